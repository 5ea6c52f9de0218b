use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ring::FusionRing;

/// Solutions of `x_a + x_b = x_c` on every channel with `x_unit = 0`:
/// logarithms of positive characters.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSpace {
    pub dimension: usize,
    /// Basis of the solution space, one vector per dimension.
    pub basis: Vec<Vec<f64>>,
}

/// Computes the space exactly over the rationals.
pub fn positive_character_space(ring: &FusionRing) -> CharacterSpace {
    let r = ring.rank();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let int = |v: i64| BigRational::from_integer(v.into());
    let mut unit = vec![BigRational::zero(); r];
    unit[0] = BigRational::one();
    rows.push(unit);
    for (a, b, c) in ring.vertices() {
        let mut coeff = vec![0i64; r];
        coeff[a] += 1;
        coeff[b] += 1;
        coeff[c] -= 1;
        if coeff.iter().any(|&v| v != 0) {
            rows.push(coeff.into_iter().map(int).collect());
        }
    }

    let pivots = rref(&mut rows, r);
    let free: Vec<usize> = (0..r).filter(|j| !pivots.contains(j)).collect();
    let basis = free
        .iter()
        .map(|&fj| {
            let mut v = vec![0.0; r];
            v[fj] = 1.0;
            for (i, &pj) in pivots.iter().enumerate() {
                v[pj] = (-&rows[i][fj]).to_f64().unwrap_or(f64::NAN);
            }
            v
        })
        .collect();
    CharacterSpace {
        dimension: free.len(),
        basis,
    }
}

/// Reduced row echelon form in place; returns pivot columns by row.
fn rref(rows: &mut Vec<Vec<BigRational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for j in 0..cols {
        let Some(p) = (top..rows.len()).find(|&i| !rows[i][j].is_zero()) else {
            continue;
        };
        rows.swap(top, p);
        let lead = rows[top][j].clone();
        for v in rows[top].iter_mut() {
            *v = &*v / &lead;
        }
        for i in 0..rows.len() {
            if i != top && !rows[i][j].is_zero() {
                let factor = rows[i][j].clone();
                for k in 0..cols {
                    let delta = &factor * &rows[top][k];
                    rows[i][k] -= delta;
                }
            }
        }
        pivots.push(j);
        top += 1;
    }
    rows.truncate(top);
    pivots
}

/// Frobenius-Perron dimensions, normalized so that `d_unit = 1`.
///
/// Power iteration on `I + Σ_a L_a` with `(L_a)_{bc} = N(a,b,c)`; the
/// shift makes the Perron root strictly dominant. Each entry is then
/// refined as the Rayleigh quotient `⟨L_a d, d⟩ / ⟨d, d⟩`.
pub fn fp_dimensions(ring: &FusionRing) -> Vec<f64> {
    let r = ring.rank();
    let mut m = vec![vec![0.0f64; r]; r];
    for (_, b, c, n) in ring.entries() {
        m[b][c] += f64::from(n);
    }
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += 1.0;
    }
    let mut d = vec![1.0; r];
    for _ in 0..10_000 {
        let mut next: Vec<f64> = m.iter().map(|row| row.iter().zip(&d).map(|(x, y)| x * y).sum()).collect();
        let scale = next.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        for v in next.iter_mut() {
            *v /= scale;
        }
        let delta = next.iter().zip(&d).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        d = next;
        if delta < 1e-15 {
            break;
        }
    }
    let unit = d[0];
    let mut d: Vec<f64> = d.into_iter().map(|v| v / unit).collect();
    let norm: f64 = d.iter().map(|v| v * v).sum();
    let refined: Vec<f64> = (0..r)
        .map(|a| {
            let quad: f64 = (0..r)
                .map(|b| d[b] * (0..r).map(|c| ring.n(a, b, c) as f64 * d[c]).sum::<f64>())
                .sum();
            quad / norm
        })
        .collect();
    d.copy_from_slice(&refined);
    d[0] = 1.0;
    d
}
