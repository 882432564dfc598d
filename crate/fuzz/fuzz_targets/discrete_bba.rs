#![no_main]

use libfuzzer_sys::fuzz_target;
use ppcr5::fusion_rules::{discrete_pcr5, DiscreteBBA, FiniteFrame, Subset};

// Layout: frame size byte, then records of (subset mask byte, f64 LE mass),
// split into two assignments at the first 0xFF mask.
fuzz_target!(|data: &[u8]| {
    let Some((&size, rest)) = data.split_first() else { return };
    let Ok(frame) = FiniteFrame::lettered(usize::from(size % 8)) else { return };
    let mut sides = rest.splitn(2, |b| *b == 0xFF);
    let decode = |bytes: &[u8]| {
        let masses = bytes.chunks_exact(9).map(|c| {
            (Subset(c[0]), f64::from_le_bytes(c[1..9].try_into().unwrap()))
        });
        DiscreteBBA::new(frame.clone(), masses.collect::<Vec<_>>())
    };
    let (Some(a), Some(b)) = (sides.next(), sides.next()) else { return };
    let (Ok(m1), Ok(m2)) = (decode(a), decode(b)) else { return };
    let fused = discrete_pcr5(&m1, &m2).expect("same frame");
    assert!((fused.total() - 1.0).abs() < 1e-9);
    assert!(fused.focal().all(|(_, m)| m.is_finite() && m >= 0.0));
});
