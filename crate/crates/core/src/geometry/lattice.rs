//! Integer column reduction used to canonicalize homotopy classes on flat tori.

type IntMatrix = Vec<Vec<i64>>;

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Column-reduce `rows` (an `m × n` integer matrix) by unimodular column operations.
///
/// Returns `(rank, u, u_inv)` with `rows · u` lower echelon: its first `rank` columns are
/// independent and the rest vanish. `u_inv` is the exact integer inverse of `u`.
fn column_reduce(rows: &[Vec<i64>], n: usize) -> (usize, IntMatrix, IntMatrix) {
    let mut a: IntMatrix = rows.to_vec();
    let mut u = identity(n);
    let mut u_inv = identity(n);
    let mut pivot = 0;

    // col_j -= q * col_k on a and u; row_k += q * row_j on u_inv.
    let axpy = |a: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, j: usize, k: usize, q: i64| {
        for row in a.iter_mut() {
            row[j] -= q * row[k];
        }
        for row in u.iter_mut() {
            row[j] -= q * row[k];
        }
        let row_j = u_inv[j].clone();
        for (dst, v) in u_inv[k].iter_mut().zip(row_j) {
            *dst += q * v;
        }
    };
    let swap = |a: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, j: usize, k: usize| {
        for row in a.iter_mut() {
            row.swap(j, k);
        }
        for row in u.iter_mut() {
            row.swap(j, k);
        }
        u_inv.swap(j, k);
    };

    for r in 0..a.len() {
        if pivot == n {
            break;
        }
        loop {
            // Smallest nonzero magnitude among columns pivot.. in this row.
            let best = (pivot..n)
                .filter(|&j| a[r][j] != 0)
                .min_by_key(|&j| a[r][j].abs());
            let Some(best) = best else { break };
            if best != pivot {
                swap(&mut a, &mut u, &mut u_inv, pivot, best);
            }
            let mut done = true;
            for j in pivot + 1..n {
                if a[r][j] != 0 {
                    let q = a[r][j].div_euclid(a[r][pivot]);
                    axpy(&mut a, &mut u, &mut u_inv, j, pivot, q);
                    if a[r][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][pivot] != 0 {
            pivot += 1;
        }
    }
    (pivot, u, u_inv)
}

/// Canonical representatives for `Z^n` modulo the saturation of a set of integer directions.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientLattice {
    n: usize,
    /// Columns spanning a complement of the saturated sublattice.
    complement: Vec<Vec<i64>>,
    /// Rows of the inverse change of basis that read off complement coordinates.
    coords: Vec<Vec<i64>>,
    /// Integer functionals that vanish exactly on the saturated sublattice.
    annihilator: Vec<Vec<i64>>,
}

impl QuotientLattice {
    /// `directions` are integer vectors in `Z^n`; they must be linearly independent.
    pub fn new(directions: &[Vec<i64>], n: usize) -> Option<Self> {
        let (rank, u, _) = column_reduce(directions, n);
        if rank != directions.len() {
            return None;
        }
        // Kernel of the direction matrix: the last n - rank columns of u.
        let annihilator: Vec<Vec<i64>> = (rank..n).map(|j| (0..n).map(|i| u[i][j]).collect()).collect();
        let (rank2, u2, u2_inv) = column_reduce(&annihilator, n);
        debug_assert_eq!(rank2, n - rank);
        let complement = (0..rank2).map(|j| (0..n).map(|i| u2[i][j]).collect()).collect();
        let coords = u2_inv[..rank2].to_vec();
        Some(QuotientLattice { n, complement, coords, annihilator })
    }

    pub fn rank(&self) -> usize {
        self.complement.len()
    }

    /// Canonical integer translate in the class of `k`.
    pub fn canonical(&self, k: &[i64]) -> Vec<i64> {
        let z: Vec<i64> = self
            .coords
            .iter()
            .map(|row| row.iter().zip(k).map(|(a, b)| a * b).sum())
            .collect();
        let mut out = vec![0; self.n];
        for (col, zi) in self.complement.iter().zip(&z) {
            for (o, c) in out.iter_mut().zip(col) {
                *o += c * zi;
            }
        }
        out
    }

    /// True when the real vector `c` lies in `Z^n + span(directions)` up to `tol`.
    pub fn contains_real(&self, c: &[f64], tol: f64) -> bool {
        self.annihilator.iter().all(|row| {
            let v: f64 = row.iter().zip(c).map(|(&a, &b)| a as f64 * b).sum();
            (v - v.round()).abs() <= tol
        })
    }
}
