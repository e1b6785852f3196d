//! Randomized algebraic properties of the field, the RS code and XOR
//! combining.

use proptest::prelude::*;

use ncc_core::gf::GfField;
use ncc_core::netcode::{nc_combine, nc_combine_frames, nc_extract};
use ncc_core::rs::validate_params;
use ncc_core::{DecodeStatus, GfSymbol, RsCode};

fn code_for(bits: u8) -> RsCode {
    let (n, k) = match bits {
        3 => (7, 2),
        4 => (15, 5),
        _ => (31, 10),
    };
    validate_params(bits, n, k, k).unwrap()
}

fn symbols(bits: u8, len: usize) -> impl Strategy<Value = Vec<GfSymbol>> {
    prop::collection::vec(0u16..(1 << bits), len).prop_map(|v| v.into_iter().map(GfSymbol::new).collect())
}

proptest! {
    #[test]
    fn field_axioms(bits in 3u8..=10, a in any::<u16>(), b in any::<u16>(), c in any::<u16>()) {
        let f = GfField::new(bits).unwrap();
        let mask = (1u16 << bits) - 1;
        let (a, b, c) = (GfSymbol::new(a & mask), GfSymbol::new(b & mask), GfSymbol::new(c & mask));
        let add = |x, y| f.add(x, y).unwrap();
        let mul = |x, y| f.mul(x, y).unwrap();
        prop_assert_eq!(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
        prop_assert_eq!(mul(mul(a, b), c), mul(a, mul(b, c)));
        prop_assert_eq!(mul(a, b), mul(b, a));
        if a != GfSymbol::ZERO {
            prop_assert_eq!(f.div(mul(a, b), a).unwrap(), b);
            prop_assert_eq!(f.inv(f.inv(a).unwrap()).unwrap(), a);
        }
    }

    #[test]
    fn rs_corrects_any_pattern_within_t(
        bits in 3u8..=5,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let code = code_for(bits);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let order = code.field().order() as u16;
        let msg: Vec<GfSymbol> = (0..code.k()).map(|_| GfSymbol::new(rng.random_range(0..order))).collect();
        let mut word = code.encode(&msg).unwrap();
        let errors = rng.random_range(0..=code.t());
        let mut hit = vec![false; code.n()];
        let mut placed = 0;
        while placed < errors {
            let p = rng.random_range(0..code.n());
            if !hit[p] {
                hit[p] = true;
                placed += 1;
                word[p] = GfSymbol::new(word[p].value() ^ rng.random_range(1..order));
            }
        }
        let (out, status) = code.decode(&word).unwrap();
        prop_assert_eq!(out, msg);
        prop_assert_eq!(status, DecodeStatus::Corrected(errors));
    }

    #[test]
    fn rs_encoding_is_xor_linear(a in symbols(4, 5), b in symbols(4, 5)) {
        let code = code_for(4);
        let f = code.field();
        let sum: Vec<_> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y).unwrap()).collect();
        let combined = nc_combine_frames(f, &[code.encode(&a).unwrap(), code.encode(&b).unwrap()]).unwrap();
        prop_assert_eq!(code.encode(&sum).unwrap(), combined.clone());
        prop_assert!(code.is_codeword(&combined).unwrap());
    }

    #[test]
    fn combining_ignores_order_and_inverts(values in prop::collection::vec(0u16..32, 1..8), rot in 0usize..8) {
        let f = GfField::new(5).unwrap();
        let syms: Vec<GfSymbol> = values.into_iter().map(GfSymbol::new).collect();
        let all = nc_combine(&f, &syms).unwrap();
        let mut turned = syms.clone();
        turned.rotate_left(rot % syms.len());
        prop_assert_eq!(nc_combine(&f, &turned).unwrap(), all);
        for i in 0..syms.len() {
            let others: Vec<_> = syms.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &s)| s).collect();
            prop_assert_eq!(nc_extract(&f, all, &others).unwrap(), syms[i]);
        }
    }

    #[test]
    fn combining_is_associative(a in 0u16..16, b in 0u16..16, c in 0u16..16) {
        let f = GfField::new(4).unwrap();
        let s = |v| GfSymbol::new(v);
        let left = nc_combine(&f, &[nc_combine(&f, &[s(a), s(b)]).unwrap(), s(c)]).unwrap();
        let right = nc_combine(&f, &[s(a), nc_combine(&f, &[s(b), s(c)]).unwrap()]).unwrap();
        prop_assert_eq!(left, right);
    }
}
