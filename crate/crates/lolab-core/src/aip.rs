//! The basic affine integer relaxation for LO_2 instances: each edge becomes
//! `x + y + z = 1` over the integers, and positive values round to 1.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hypergraph::{Assignment, Hypergraph3};

/// `A x = b` over the integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntLinSystem {
    columns: usize,
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
}

impl IntLinSystem {
    pub fn new(columns: usize, rows: Vec<Vec<BigInt>>, rhs: Vec<BigInt>) -> Result<Self> {
        if rows.len() != rhs.len() {
            return Err(Error::TableLength { expected: rows.len(), found: rhs.len() });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != columns) {
            return Err(Error::TableLength { expected: columns, found: r.len() });
        }
        Ok(IntLinSystem { columns, rows, rhs })
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[BigInt] {
        &self.rhs
    }

    /// First row that `x` does not satisfy.
    pub fn violated_row(&self, x: &[BigInt]) -> Option<usize> {
        if x.len() != self.columns {
            return Some(0);
        }
        self.rows.iter().zip(&self.rhs).position(|(row, b)| {
            let lhs: BigInt = row.iter().zip(x).map(|(a, v)| a * v).sum();
            &lhs != b
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntSolution(pub Vec<BigInt>);

/// One row per edge, coefficients are vertex multiplicities, right-hand side 1.
pub fn build_system(h: &Hypergraph3) -> IntLinSystem {
    let rows = h
        .edges()
        .iter()
        .map(|e| {
            let mut row = vec![BigInt::zero(); h.vertices()];
            for &v in e {
                row[v] += 1;
            }
            row
        })
        .collect();
    IntLinSystem { columns: h.vertices(), rows, rhs: vec![BigInt::one(); h.edges().len()] }
}

/// Columns of `[A; I]`; column operations keep `A U` and `U` side by side.
struct Augmented {
    m: usize,
    cols: Vec<Vec<BigInt>>,
}

impl Augmented {
    /// `(col_p, col_j) <- (s col_p + t col_j, u col_p + v col_j)`.
    fn combine(&mut self, p: usize, j: usize, [s, t, u, v]: [&BigInt; 4]) {
        let (lo, hi) = self.cols.split_at_mut(j);
        let (cp, cj) = (&mut lo[p], &mut hi[0]);
        for (a, b) in cp.iter_mut().zip(cj.iter_mut()) {
            let na = s * &*a + t * &*b;
            let nb = u * &*a + v * &*b;
            *a = na;
            *b = nb;
        }
    }

    fn axpy(&mut self, target: usize, q: &BigInt, source: usize) {
        for i in 0..self.cols[target].len() {
            let d = q * &self.cols[source][i];
            self.cols[target][i] -= d;
        }
    }
}

/// A particular integer solution from the column Hermite normal form, with
/// free parameters at 0, or `None` when no integer solution exists.
/// Every returned solution has been checked by substitution.
pub fn solve_integer(sys: &IntLinSystem) -> Option<IntSolution> {
    let (m, n) = (sys.rows.len(), sys.columns);
    let mut aug = Augmented {
        m,
        cols: (0..n)
            .map(|j| {
                let mut c: Vec<BigInt> = sys.rows.iter().map(|r| r[j].clone()).collect();
                c.extend((0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
                c
            })
            .collect(),
    };
    // pivots[r] = Some(column) for rows that received a pivot
    let mut pivots: Vec<Option<usize>> = vec![None; m];
    let mut p = 0;
    for r in 0..m {
        if p == n {
            break;
        }
        for j in p + 1..n {
            if aug.cols[j][r].is_zero() {
                continue;
            }
            if aug.cols[p][r].is_zero() {
                aug.cols.swap(p, j);
                continue;
            }
            let (a, b) = (aug.cols[p][r].clone(), aug.cols[j][r].clone());
            let e = a.extended_gcd(&b);
            let (u, v) = (-(&b / &e.gcd), &a / &e.gcd);
            aug.combine(p, j, [&e.x, &e.y, &u, &v]);
        }
        if aug.cols[p][r].is_zero() {
            continue;
        }
        if aug.cols[p][r].is_negative() {
            for x in aug.cols[p].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot = aug.cols[p][r].clone();
        for j in 0..p {
            let q = aug.cols[j][r].div_floor(&pivot);
            if !q.is_zero() {
                aug.axpy(j, &q, p);
            }
        }
        pivots[r] = Some(p);
        p += 1;
    }

    // forward substitution on the lower-trapezoidal A U
    let mut y = vec![BigInt::zero(); n];
    for r in 0..m {
        let known: BigInt = (0..p).map(|j| &aug.cols[j][r] * &y[j]).sum();
        let residual = &sys.rhs[r] - known;
        match pivots[r] {
            Some(c) => {
                let (q, rem) = residual.div_rem(&aug.cols[c][r]);
                if !rem.is_zero() {
                    return None;
                }
                y[c] = q;
            }
            None if !residual.is_zero() => return None,
            None => {}
        }
    }
    let x: Vec<BigInt> = (0..n).map(|i| (0..n).map(|j| &aug.cols[j][aug.m + i] * &y[j]).sum()).collect();
    assert_eq!(sys.violated_row(&x), None, "integer solver returned a non-solution");
    Some(IntSolution(x))
}

/// Positive values to 1, the rest to 0. Every edge of `h` comes out
/// non-constant; this is asserted.
pub fn round_to_nae(sol: &IntSolution, h: &Hypergraph3) -> Result<Assignment> {
    let sys = build_system(h);
    if sol.0.len() != h.vertices() {
        return Err(Error::AssignmentLength { expected: h.vertices(), found: sol.0.len() });
    }
    if let Some(r) = sys.violated_row(&sol.0) {
        return Err(Error::NotASolution(r));
    }
    let a: Vec<u8> = sol.0.iter().map(|v| v.is_positive() as u8).collect();
    for &[x, y, z] in h.edges() {
        assert!(!(a[x] == a[y] && a[y] == a[z]), "rounded edge is constant");
    }
    Ok(Assignment(a))
}

/// Build, solve and round. `None` means no integer solution, which rules
/// out an LO_2 colouring.
pub fn aip_pipeline(h: &Hypergraph3) -> Option<Assignment> {
    let sol = solve_integer(&build_system(h))?;
    Some(round_to_nae(&sol, h).expect("solver output satisfies its own system"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::plant_lo2;
    use hashbrown::HashSet;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn system(rows: &[&[i64]], rhs: &[i64]) -> IntLinSystem {
        IntLinSystem::new(rows[0].len(), rows.iter().map(|r| ints(r)).collect(), ints(rhs)).unwrap()
    }

    #[test]
    fn build_examples() {
        let h = Hypergraph3::new(3, vec![[0, 1, 2], [0, 0, 1], [2, 2, 2]]).unwrap();
        let s = build_system(&h);
        assert_eq!(s.rows(), &[ints(&[1, 1, 1]), ints(&[2, 1, 0]), ints(&[0, 0, 3])]);
        assert_eq!(s.rhs(), ints(&[1, 1, 1]).as_slice());
        for row in s.rows() {
            assert_eq!(row.iter().sum::<BigInt>(), BigInt::from(3));
        }
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve_integer(&system(&[&[3]], &[1])), None);
        let s = system(&[&[1, 1, 1]], &[1]);
        assert_eq!(s.violated_row(&solve_integer(&s).unwrap().0), None);
        let s = system(&[&[2, 1]], &[1]);
        assert_eq!(solve_integer(&s).unwrap().0, ints(&[0, 1]));
        // 2x + 4y = 3 has rational but no integer solutions
        assert_eq!(solve_integer(&system(&[&[2, 4]], &[3])), None);
        // inconsistent dependent rows
        assert_eq!(solve_integer(&system(&[&[1, 1], &[2, 2]], &[1, 3])), None);
        let s = system(&[&[6, 10, 15], &[1, 1, 1]], &[1, 0]);
        assert_eq!(s.violated_row(&solve_integer(&s).unwrap().0), None);
    }

    #[test]
    fn round_examples() {
        let h = Hypergraph3::new(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(round_to_nae(&IntSolution(ints(&[1, 0, 0])), &h).unwrap(), Assignment(vec![1, 0, 0]));
        assert_eq!(round_to_nae(&IntSolution(ints(&[-1, 3, -1])), &h).unwrap(), Assignment(vec![0, 1, 0]));
        assert_eq!(round_to_nae(&IntSolution(ints(&[1, 1, 0])), &h).err(), Some(Error::NotASolution(0)));
    }

    #[test]
    fn pipeline_examples() {
        assert_eq!(aip_pipeline(&Hypergraph3::new(1, vec![[0, 0, 0]]).unwrap()), None);
        assert_eq!(aip_pipeline(&Hypergraph3::new(4, vec![]).unwrap()), Some(Assignment(vec![0; 4])));
        for seed in 0..20 {
            let (h, _) = plant_lo2(5 + seed as usize * 2, 3 * (5 + seed as usize * 2), seed).unwrap();
            let a = aip_pipeline(&h).unwrap();
            assert!(h.edges().iter().all(|&[x, y, z]| !(a.0[x] == a.0[y] && a.0[y] == a.0[z])));
        }
    }

    /// Exhaustive search over `[-10, 10]^n`, halves joined through a hash set
    /// of partial left-hand sides.
    fn box_has_solution(rows: &[Vec<i64>], rhs: &[i64], n: usize) -> bool {
        let half = n / 2;
        let partial = |lo: usize, hi: usize| -> Vec<Vec<i64>> {
            let mut out = vec![vec![0i64; rows.len()]];
            for j in lo..hi {
                let mut next = Vec::with_capacity(out.len() * 21);
                for acc in &out {
                    for v in -10..=10 {
                        next.push(acc.iter().zip(rows).map(|(s, r)| s + r[j] * v).collect());
                    }
                }
                out = next;
            }
            out
        };
        let left: HashSet<Vec<i64>> = partial(0, half).into_iter().collect();
        partial(half, n).iter().any(|r| {
            let need: Vec<i64> = rhs.iter().zip(r).map(|(b, s)| b - s).collect();
            left.contains(&need)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn solver_agrees_with_box_search(
            n in 1usize..=8,
            raw in proptest::collection::vec((proptest::collection::vec(0i64..=3, 8), -3i64..=3), 1..=4),
        ) {
            let rows: Vec<Vec<i64>> = raw.iter().map(|(r, _)| r[..n].to_vec()).collect();
            let rhs: Vec<i64> = raw.iter().map(|(_, b)| *b).collect();
            let sys = IntLinSystem::new(n, rows.iter().map(|r| ints(r)).collect(), ints(&rhs)).unwrap();
            let solved = solve_integer(&sys);
            if let Some(x) = &solved {
                prop_assert_eq!(sys.violated_row(&x.0), None);
            }
            if box_has_solution(&rows, &rhs, n) {
                prop_assert!(solved.is_some());
            }
        }
    }
}
