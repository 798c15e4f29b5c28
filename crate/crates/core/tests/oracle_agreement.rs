use num_bigint::BigInt;
use rhpwn_core::oracle::{check_eq1, eq1_terms, PolyRepOps};
use rhpwn_core::scalar::CScalar;
use rhpwn_core::wick::{monomial_commutator, PointLabel};

#[test]
fn word_engine_matches_matrices() {
    let ops = PolyRepOps::build(24).unwrap();
    for n in 0..=4i64 {
        for k in 0..=4i64 {
            for nn in 0..=4i64 {
                for kk in 0..=4i64 {
                    let e = monomial_commutator(n, k, nn, kk, PointLabel::T, PointLabel::S).unwrap();
                    let shadow = e.coincident();
                    let terms: Vec<(BigInt, u32, u32)> = shadow
                        .iter()
                        .map(|(&(p, q), c)| {
                            assert!(c.is_real() && c.re().is_integer());
                            (c.re().to_integer(), p, q)
                        })
                        .collect();
                    let formula: Vec<(BigInt, u32, u32)> = eq1_terms(n, k, nn, kk).unwrap();
                    let mut a = terms.clone();
                    let mut b = formula.clone();
                    a.sort_by_key(|t| (t.1, t.2));
                    b.sort_by_key(|t| (t.1, t.2));
                    assert_eq!(a, b, "({n},{k},{nn},{kk})");

                    let lhs = ops.commutator_matrix(n as u32, k as u32, nn as u32, kk as u32);
                    let rhs = ops.normal_ordered(&terms);
                    let safe = 24 - (n + k + nn + kk) as usize;
                    assert!(lhs.agrees_on_columns(&rhs, safe), "matrix ({n},{k},{nn},{kk})");
                }
            }
        }
    }
}

#[test]
fn eq1_on_small_grid() {
    for n in 0..=3 {
        for k in 0..=3 {
            for nn in 0..=3 {
                for kk in 0..=3 {
                    assert!(check_eq1(n, k, nn, kk, 14).unwrap());
                }
            }
        }
    }
}

#[test]
fn shadow_of_number_operators_vanishes() {
    let e = monomial_commutator(1, 1, 1, 1, PointLabel::T, PointLabel::S).unwrap();
    assert!(e.coincident().values().all(CScalar::is_zero));
}
