//! Power series for the round 2-sphere in geodesic normal coordinates.
//!
//! With `u = |v|²`, the exponential map at `p` is
//! `exp_p(v) = C(u) p + Sc(u) v` and the pulled-back round metric is
//! `F(u) I + K(u) v vᵀ`, where `C = cos√u`, `Sc = sin√u / √u`,
//! `F = Sc²` and `K = (1 - F) / u`. All four are entire in `u`.

use std::sync::OnceLock;

use crate::jet::Scalar;

const TERMS: usize = 22;

struct Tables {
    cos: [f64; TERMS],
    sinc: [f64; TERMS],
    f: [f64; TERMS],
    k: [f64; TERMS],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut cos = [0.0; TERMS];
        let mut sinc = [0.0; TERMS];
        let mut fact = 1.0f64;
        for m in 0..2 * TERMS + 1 {
            if m > 0 {
                fact *= m as f64;
            }
            let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if m % 2 == 0 && m / 2 < TERMS {
                cos[m / 2] = sign / fact;
            } else if m % 2 == 1 && m / 2 < TERMS {
                sinc[m / 2] = sign / fact;
            }
        }
        let mut f = [0.0; TERMS];
        for i in 0..TERMS {
            f[i] = (0..=i).map(|j| sinc[j] * sinc[i - j]).sum();
        }
        let mut k = [0.0; TERMS];
        for i in 0..TERMS - 1 {
            k[i] = -f[i + 1];
        }
        Tables { cos, sinc, f, k }
    })
}

fn horner<S: Scalar>(coef: &[f64], u: S) -> S {
    coef.iter()
        .rev()
        .fold(S::cst(0.0), |acc, &c| acc * u + c)
}

pub fn cos_sqrt<S: Scalar>(u: S) -> S {
    horner(&tables().cos, u)
}

pub fn sinc_sqrt<S: Scalar>(u: S) -> S {
    horner(&tables().sinc, u)
}

pub fn metric_f<S: Scalar>(u: S) -> S {
    horner(&tables().f, u)
}

pub fn metric_k<S: Scalar>(u: S) -> S {
    horner(&tables().k[..TERMS - 1], u)
}

/// Chebyshev polynomial `T_m(y)`, so that `T_m(cos ϑ) = cos(mϑ)`.
pub fn chebyshev<S: Scalar>(m: u32, y: S) -> S {
    let (mut t0, mut t1) = (S::cst(1.0), y);
    if m == 0 {
        return t0;
    }
    for _ in 1..m {
        let t2 = y * t1 * 2.0 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// Unit vectors `(p, ∂_ϑ, ∂_φ / sin ϑ)` at colatitude `ϑ`, longitude `φ`.
/// Orthonormal everywhere, including the poles.
pub fn frame(colatitude: f64, longitude: f64) -> [[f64; 3]; 3] {
    let (st, ct) = colatitude.sin_cos();
    let (sp, cp) = longitude.sin_cos();
    [
        [st * cp, st * sp, ct],
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
    ]
}

/// `(colatitude, longitude)` of a unit vector.
pub fn to_angles(y: [f64; 3]) -> (f64, f64) {
    (y[2].clamp(-1.0, 1.0).acos(), y[1].atan2(y[0]))
}
