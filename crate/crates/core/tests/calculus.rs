mod common;

use common::{homogeneous_in, int, poly_in, prod, small_table, var};
use proptest::prelude::*;
use superstar::calculus::{bidiff_apply, d_left, d_right};
use superstar::{GradedPoly, Grading, Parity, VarTable};

#[test]
fn derivative_examples() {
    let t = small_table();
    let s = |n: &str| t.spec(n).unwrap();
    let t12 = prod(&t, &["t1", "t2"]);
    assert_eq!(d_left(s("t2"), &t12), -var(&t, "t1"));
    assert_eq!(d_left(s("t1"), &t12), var(&t, "t2"));
    assert_eq!(d_right(s("t2"), &t12), var(&t, "t1"));
    assert_eq!(d_right(s("t1"), &t12), -var(&t, "t2"));
    let inv = GradedPoly::var_pow(s("l"), -1).unwrap();
    assert_eq!(d_left(s("l"), &inv), -GradedPoly::var_pow(s("l"), -2).unwrap());
    assert_eq!(d_right(s("x"), &prod(&t, &["x", "x", "t1"])), &int(2) * &prod(&t, &["x", "t1"]));
}

#[test]
fn first_kernel_step() {
    let t = VarTable::builder().even("x").even("y").odd("ti").odd("tj").constant("w").build().unwrap();
    let s = |n: &str| t.spec(n).unwrap();
    let w = var(&t, "w");
    let (slots, value) = bidiff_apply(&w, s("ti"), s("tj"), &var(&t, "ti"), &var(&t, "tj"));
    assert_eq!((slots.left, slots.right, slots.sign), (int(1), int(1), 1));
    assert_eq!(value, w);
    let (slots, _) = bidiff_apply(&int(1), s("x"), s("y"), &var(&t, "x"), &var(&t, "y"));
    assert_eq!((slots.left, slots.right, slots.sign), (int(1), int(1), 1));
    let (slots, value) = bidiff_apply(&int(1), s("ti"), s("tj"), &prod(&t, &["ti", "tj"]), &var(&t, "tj"));
    assert_eq!(slots.left, -var(&t, "tj"));
    assert_eq!(slots.right, int(1));
    assert_eq!(value, -var(&t, "tj"));
}

fn odd_bit(p: &GradedPoly) -> bool {
    p.parity_of() == Grading::Odd
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn graded_leibniz(
        a in poly_in(&small_table(), 3, 3),
        b in poly_in(&small_table(), 3, 3),
        which in 0usize..6,
    ) {
        let t = small_table();
        let v = t.iter().nth(which).unwrap();
        let (a0, a1) = a.homogeneous_parts();
        for part in [a0, a1] {
            let sign = if v.is_odd() && odd_bit(&part) { int(-1) } else { int(1) };
            let lhs = d_left(v, &(&part * &b));
            let rhs = &(&d_left(v, &part) * &b) + &(&sign * &(&part * &d_left(v, &b)));
            prop_assert_eq!(lhs, rhs);
            // right derivatives pick up the sign from the right factor
            let (b0, b1) = b.homogeneous_parts();
            for bp in [b0, b1] {
                let sign = if v.is_odd() && odd_bit(&bp) { int(-1) } else { int(1) };
                let lhs = d_right(v, &(&part * &bp));
                let rhs = &(&sign * &(&d_right(v, &part) * &bp)) + &(&part * &d_right(v, &bp));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn left_and_right_agree_up_to_sign(a in homogeneous_in(&small_table(), Parity::Odd, 4, 4), b in homogeneous_in(&small_table(), Parity::Even, 4, 4)) {
        let t = small_table();
        for v in t.iter() {
            for p in [&a, &b] {
                // d_left f = (-1)^{|v|(|f|+1)} f d_right
                let flip = v.is_odd() && !odd_bit(p);
                let r = d_right(v, p);
                prop_assert_eq!(d_left(v, p), if flip { -r } else { r });
            }
        }
    }

    #[test]
    fn derivatives_supercommute(a in poly_in(&small_table(), 4, 4)) {
        let t = small_table();
        for u in t.iter() {
            for v in t.iter() {
                let uv = d_left(u, &d_left(v, &a));
                let vu = d_left(v, &d_left(u, &a));
                let s = if u.is_odd() && v.is_odd() { -vu } else { vu };
                prop_assert_eq!(uv, s);
            }
        }
    }
}
