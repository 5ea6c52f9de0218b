//! Independent reference computations shared by the integration tests.
//!
//! Everything here works entry by entry, with the textbook scalar forms of
//! the identities, and shares no code with the library beyond data access.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use unitarize::braided::RSymbolSet;
use unitarize::cohomology::{tuples, Cochain};
use unitarize::fusion::{FSymbolSet, FusionRing};
use unitarize::linalg::CMatrix;

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// `F^{abc}_{d;e,f}` for a multiplicity-free ring, zero when inadmissible.
pub fn f_entry(f: &FSymbolSet, a: usize, b: usize, c: usize, d: usize, e: usize, g: usize) -> C {
    let r = f.ring();
    if r.n(a, b, e) == 0 || r.n(e, c, d) == 0 || r.n(b, c, g) == 0 || r.n(a, g, d) == 0 {
        return zero();
    }
    let row = (0..e).filter(|&x| r.n(a, b, x) > 0 && r.n(x, c, d) > 0).count();
    let col = (0..g).filter(|&x| r.n(b, c, x) > 0 && r.n(a, x, d) > 0).count();
    f.block(a, b, c, d).expect("admissible block")[(row, col)]
}

fn r_entry(r: &RSymbolSet, a: usize, b: usize, c: usize) -> C {
    r.block(a, b, c).map_or(zero(), |m| m[(0, 0)])
}

/// Max absolute defect of
/// `F^{fcd}_{e;gl} F^{abl}_{e;fk} = Σ_h F^{abc}_{g;fh} F^{ahd}_{e;gk} F^{bcd}_{k;hl}`.
pub fn scalar_pentagon(f: &FSymbolSet) -> f64 {
    let n = f.ring().rank();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        for ff in 0..n {
                            for g in 0..n {
                                for k in 0..n {
                                    for l in 0..n {
                                        let lhs = f_entry(f, ff, c, d, e, g, l) * f_entry(f, a, b, l, e, ff, k);
                                        let rhs: C = (0..n)
                                            .map(|h| {
                                                f_entry(f, a, b, c, g, ff, h)
                                                    * f_entry(f, a, h, d, e, g, k)
                                                    * f_entry(f, b, c, d, k, h, l)
                                            })
                                            .sum();
                                        worst = worst.max((lhs - rhs).norm());
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

/// Max absolute defect of both hexagons,
/// `R^{ab}_e F^{bac}_{d;eg} R^{ac}_g = Σ_f F^{abc}_{d;ef} R^{af}_d F^{bca}_{d;fg}`
/// and the same identity for `R̄^{ab}_c = 1 / R^{ba}_c`.
pub fn scalar_hexagon(f: &FSymbolSet, r: &RSymbolSet) -> f64 {
    let n = f.ring().rank();
    let ring = f.ring();
    let fwd = |a: usize, b: usize, c: usize| r_entry(r, a, b, c);
    let rev = |a: usize, b: usize, c: usize| {
        if ring.n(a, b, c) == 0 {
            zero()
        } else {
            r_entry(r, b, a, c).inv()
        }
    };
    let mut worst: f64 = 0.0;
    for family in 0..2 {
        let rr = |a, b, c| if family == 0 { fwd(a, b, c) } else { rev(a, b, c) };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            for g in 0..n {
                                if ring.n(a, b, e) == 0 || ring.n(a, c, g) == 0 {
                                    continue;
                                }
                                let lhs = rr(a, b, e) * f_entry(f, b, a, c, d, e, g) * rr(a, c, g);
                                let rhs: C = (0..n)
                                    .map(|x| f_entry(f, a, b, c, d, e, x) * rr(a, x, d) * f_entry(f, b, c, a, d, x, g))
                                    .sum();
                                worst = worst.max((lhs - rhs).norm());
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

/// `Σ_e N_ab^e N_ec^d = Σ_f N_bc^f N_af^d` for all `a, b, c, d`.
pub fn ring_is_associative(r: &FusionRing) -> bool {
    let n = r.rank();
    (0..n).all(|a| {
        (0..n).all(|b| {
            (0..n).all(|c| {
                (0..n).all(|d| {
                    let l: usize = (0..n).map(|e| r.n(a, b, e) * r.n(e, c, d)).sum();
                    let rr: usize = (0..n).map(|f| r.n(b, c, f) * r.n(a, f, d)).sum();
                    l == rr
                })
            })
        })
    })
}

/// Coboundary by the explicit formula for degrees 1 and 2, written out
/// rather than through the alternating sum.
pub fn explicit_coboundary(c: &Cochain) -> Vec<C> {
    let g = c.group();
    let n = g.order();
    match c.degree() {
        1 => {
            let mut out = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    out.push(c.value(&[b]) * c.value(&[a]) / c.value(&[g.mul(a, b)]));
                }
            }
            out
        }
        2 => tuples(n, 3)
            .into_iter()
            .map(|t| {
                let (a, b, k) = (t[0], t[1], t[2]);
                c.value(&[b, k]) * c.value(&[a, g.mul(b, k)]) / (c.value(&[g.mul(a, b), k]) * c.value(&[a, b]))
            })
            .collect(),
        _ => panic!("explicit formula only for degrees 1 and 2"),
    }
}

/// `δω(g,h,k,l)` for a 3-cochain.
pub fn explicit_pentagon_cocycle(w: &Cochain) -> f64 {
    let g = w.group();
    let n = g.order();
    let mut worst: f64 = 0.0;
    for t in tuples(n, 4) {
        let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
        let v = w.value(&[b, c, d]) * w.value(&[a, g.mul(b, c), d]) * w.value(&[a, b, c])
            / (w.value(&[g.mul(a, b), c, d]) * w.value(&[a, b, g.mul(c, d)]));
        worst = worst.max((v - 1.0).norm());
    }
    worst
}

/// Square root of a positive 2x2 matrix:
/// `√P = (P + s I) / t` with `s = √det P`, `t = √(tr P + 2s)`.
pub fn sqrt_2x2(p: &CMatrix) -> CMatrix {
    let det = (p[(0, 0)] * p[(1, 1)] - p[(0, 1)] * p[(1, 0)]).re;
    let s = det.sqrt();
    let t = ((p[(0, 0)] + p[(1, 1)]).re + 2.0 * s).sqrt();
    let mut out = p.clone();
    out[(0, 0)] += s;
    out[(1, 1)] += s;
    out / C::new(t, 0.0)
}
