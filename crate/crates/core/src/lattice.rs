//! Full-rank lattices in `Q^r` (r = 1, 2) with integer row reduction, used
//! for the unit groups of inductive valuations.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ordgroup::GroupValue;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub basis: Vec<Vec<BigRational>>,
}

/// A new basis vector written in terms of the old basis and the adjoined
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisRep {
    pub old: Vec<BigInt>,
    pub gen: BigInt,
}

impl Lattice {
    /// `Z^r`.
    pub fn standard(r: usize) -> Self {
        let basis = (0..r)
            .map(|i| (0..r).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        Lattice { basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_values(&self) -> Vec<GroupValue> {
        self.basis.iter().map(|b| GroupValue::from_components(b)).collect()
    }

    /// Rational coordinates of `v` in the basis.
    pub fn coords(&self, v: &[BigRational]) -> Vec<BigRational> {
        let r = self.rank();
        // Solve sum c_i b_i = v: columns are basis vectors.
        let mut m: Vec<Vec<BigRational>> = (0..r)
            .map(|row| {
                let mut line: Vec<BigRational> = (0..r).map(|i| self.basis[i][row].clone()).collect();
                line.push(v[row].clone());
                line
            })
            .collect();
        for col in 0..r {
            let piv = (col..r).find(|&i| !m[i][col].is_zero()).expect("basis is full rank");
            m.swap(col, piv);
            let inv = m[col][col].recip();
            for x in m[col].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..r {
                if i != col && !m[i][col].is_zero() {
                    let f = m[i][col].clone();
                    let pivot_row = m[col].clone();
                    for (x, y) in m[i].iter_mut().zip(pivot_row.iter()) {
                        *x = &*x - &f * y;
                    }
                }
            }
        }
        m.into_iter().map(|line| line[r].clone()).collect()
    }

    pub fn contains(&self, v: &GroupValue) -> bool {
        v.is_finite() && self.coords(&v.components()).iter().all(|c| c.is_integer())
    }

    /// Integer coordinates of a lattice member.
    pub fn int_coords(&self, v: &GroupValue) -> Option<Vec<BigInt>> {
        let c = self.coords(&v.components());
        c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
    }

    /// Least `e > 0` with `e v` in the lattice.
    pub fn order_of(&self, v: &GroupValue) -> BigInt {
        self.coords(&v.components()).iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Lattice generated by this one and `g`, with each new basis vector
    /// expressed through the old basis and `g`.
    pub fn extend(&self, g: &GroupValue) -> (Lattice, Vec<BasisRep>) {
        let r = self.rank();
        let mut rows: Vec<Vec<BigRational>> = self.basis.clone();
        rows.push(g.components());
        let den = rows
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let dr = BigRational::from_integer(den.clone());
        let mut m: Vec<Vec<BigInt>> = rows.iter().map(|row| row.iter().map(|x| (x * &dr).to_integer()).collect()).collect();
        let mut u: Vec<Vec<BigInt>> = (0..=r)
            .map(|i| (0..=r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        for col in 0..r {
            loop {
                // Row with the smallest nonzero entry in this column goes to `col`.
                let best = (col..=r)
                    .filter(|&i| !m[i][col].is_zero())
                    .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()))
                    .expect("full rank");
                m.swap(col, best);
                u.swap(col, best);
                let mut done = true;
                for i in col + 1..=r {
                    if m[i][col].is_zero() {
                        continue;
                    }
                    let q = m[i][col].div_floor(&m[col][col]);
                    for j in 0..r {
                        let t = &q * &m[col][j];
                        m[i][j] -= t;
                    }
                    for j in 0..=r {
                        let t = &q * &u[col][j];
                        u[i][j] -= t;
                    }
                    if !m[i][col].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
        }
        debug_assert!(m[r].iter().all(|x| x.is_zero()));
        let basis = m[..r]
            .iter()
            .map(|row| row.iter().map(|x| BigRational::new(x.clone(), den.clone())).collect())
            .collect();
        let reps = u[..r]
            .iter()
            .map(|row| BasisRep { old: row[..r].to_vec(), gen: row[r].clone() })
            .collect();
        (Lattice { basis }, reps)
    }

    /// `sum c_i b_i` for integer coefficients.
    pub fn combine(&self, c: &[BigInt]) -> GroupValue {
        let r = self.rank();
        let mut out = vec![BigRational::zero(); r];
        for (ci, b) in c.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += x * BigRational::from_integer(ci.clone());
            }
        }
        GroupValue::from_components(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordgroup::rat;
    use proptest::prelude::*;

    #[test]
    fn extend_rank_one() {
        let l = Lattice::standard(1);
        let (m, reps) = l.extend(&GroupValue::r1(2, 3));
        assert_eq!(m.basis, vec![vec![rat(1, 3)]]);
        // 1/3 = a*1 + b*(2/3)
        let v = l.combine(&reps[0].old).add(&GroupValue::r1(2, 3).mul_int(i64::try_from(reps[0].gen.clone()).unwrap()));
        assert_eq!(v, GroupValue::r1(1, 3));
        assert_eq!(m.order_of(&GroupValue::r1(1, 6)), BigInt::from(2));
    }

    proptest! {
        #[test]
        fn extension_reps_are_exact(a in -20i64..20, b in -20i64..20, d1 in 1i64..7, d2 in 1i64..7) {
            let l = Lattice::standard(2);
            let g = GroupValue::Rank2(rat(a, d1), rat(b, d2));
            let (m, reps) = l.extend(&g);
            prop_assert!(m.contains(&g));
            for (bv, rep) in m.basis_values().iter().zip(&reps) {
                let gen = g.scale(&BigRational::from_integer(rep.gen.clone()));
                prop_assert_eq!(l.combine(&rep.old).add(&gen), bv.clone());
            }
            // Index of Z^2 in the new lattice equals the order of g.
            let det = &m.basis[0][0] * &m.basis[1][1] - &m.basis[0][1] * &m.basis[1][0];
            prop_assert_eq!(det.abs().recip(), BigRational::from_integer(l.order_of(&g)));
        }
    }
}
