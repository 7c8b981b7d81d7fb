//! Closed-form root finding for the low-order polynomials that describe
//! constant-jerk motion.

/// Real roots of `c2 x² + c1 x + c0 = 0`, with the degenerate linear and
/// constant cases handled. A repeated root is reported once.
pub fn quadratic_roots(c2: f64, c1: f64, c0: f64) -> RootSet {
    let mut out = RootSet::new();
    if c2 == 0.0 {
        if c1 != 0.0 {
            out.push(-c0 / c1);
        }
        return out;
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return out;
    }
    if disc == 0.0 {
        out.push(-c1 / (2.0 * c2));
        return out;
    }
    // Numerically stable pair: avoid cancellation between -c1 and sqrt(disc).
    let q = -0.5 * (c1 + c1.signum_nonzero() * disc.sqrt());
    out.push(q / c2);
    if q != 0.0 {
        out.push(c0 / q);
    } else {
        out.push(0.0);
    }
    out
}

/// Real roots of `c3 x³ + c2 x² + c1 x + c0 = 0`.
///
/// Uses the trigonometric form for three real roots and Cardano's formula
/// otherwise; each root gets two Newton polish steps.
pub fn cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> RootSet {
    if c3 == 0.0 {
        return quadratic_roots(c2, c1, c0);
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    // Depressed cubic t³ + p t + q with x = t - a/3.
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let mut out = RootSet::new();
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if p == 0.0 && q == 0.0 {
        out.push(-shift);
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        out.push(u + v - shift);
    } else {
        // Three real roots (two coincide when disc == 0).
        let r = (-p / 3.0).sqrt();
        let cos_arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = cos_arg.acos();
        for k in 0..3 {
            let angle = (phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0;
            out.push(2.0 * r * angle.cos() - shift);
        }
    }
    for root in out.iter_mut() {
        for _ in 0..2 {
            let f = ((c3 * *root + c2) * *root + c1) * *root + c0;
            let df = (3.0 * c3 * *root + 2.0 * c2) * *root + c1;
            if df != 0.0 {
                let next = *root - f / df;
                if next.is_finite() {
                    *root = next;
                }
            }
        }
    }
    out
}

trait SignumNonZero {
    fn signum_nonzero(self) -> f64;
}

impl SignumNonZero for f64 {
    #[inline]
    fn signum_nonzero(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// Up to three real roots, stored inline.
#[derive(Debug, Clone, Copy, Default)]
pub struct RootSet {
    roots: [f64; 3],
    len: usize,
}

impl RootSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: f64) {
        if r.is_finite() && self.len < 3 {
            self.roots[self.len] = r;
            self.len += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.roots[..self.len].iter().copied()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.roots[..self.len].iter_mut()
    }
}
