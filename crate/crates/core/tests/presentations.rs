use mcdw::params::{Family, FamilyParams};
use mcdw::presentations::{macdonald_presentation, parse_word, presentation, symmetric_residue, Presentation, Word};
use proptest::prelude::*;

fn letters() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop::sample::select(vec![1, -1, 2, -2, 3, -3]), 0..40)
}

/// Free reduction by a stack, as an independent oracle.
fn stack_reduce(ls: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &l in ls {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn expand(w: &Word) -> Vec<i32> {
    w.syllables()
        .iter()
        .flat_map(|&(g, e)| std::iter::repeat_n((g as i32 + 1) * e.signum() as i32, e.unsigned_abs() as usize))
        .collect()
}

proptest! {
    #[test]
    fn reduction_matches_stack_oracle(ls in letters()) {
        let w = Word::from_letters(&ls);
        prop_assert_eq!(expand(&w), stack_reduce(&ls));
        prop_assert_eq!(w.len(), stack_reduce(&ls).len());
    }

    #[test]
    fn inverse_cancels(ls in letters()) {
        let w = Word::from_letters(&ls);
        prop_assert!(w.concat(&w.invert()).is_identity());
        prop_assert_eq!(w.invert().invert(), w);
    }

    #[test]
    fn pow_adds_exponents(ls in letters(), a in -4i64..5, b in -4i64..5) {
        let w = Word::from_letters(&ls);
        prop_assert_eq!(w.pow(a).concat(&w.pow(b)), w.pow(a + b));
    }

    #[test]
    fn display_parse_round_trip(ls in letters()) {
        let w = Word::from_letters(&ls);
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let text = w.display_with(&names);
        if !w.is_identity() {
            prop_assert_eq!(parse_word(&text, &names).unwrap(), w);
        }
    }

    #[test]
    fn symmetric_residue_range(e in -10_000i64..10_000, n in 1i64..500) {
        let r = symmetric_residue(e, n);
        prop_assert!(2 * r > -n && 2 * r <= n);
        prop_assert_eq!((e - r).rem_euclid(n), 0);
    }
}

#[test]
fn j_presentations_use_reduced_alpha() {
    // alpha = 1 + 5 ell and the power relators have exponent 125, so ell and
    // ell + 25 give the same relators.
    let a = presentation(&FamilyParams::new(Family::J1, 5, 1, 1).unwrap()).unwrap();
    let b = presentation(&FamilyParams::new(Family::J1, 5, 1, 26).unwrap()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.relators.len(), 4);
    assert_eq!(a.relators[2], Word::power_of(0, 125));
}

#[test]
fn parse_rejects_malformed() {
    for bad in ["", "x, y", "| x", "1x | x", "x | x^", "x | (x", "x | x y z"] {
        assert!(Presentation::parse(bad).is_err(), "{bad:?} accepted");
    }
}

#[test]
fn macdonald_shape() {
    let g = macdonald_presentation(-3).unwrap();
    assert_eq!(g.ngens(), 2);
    assert_eq!(g.relators.len(), 2);
}
