use std::fmt;

use crate::attribution::Explanation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

/// Midpoint of the scale.
pub const NEUTRAL: Rgb = Rgb(0xf7, 0xf7, 0xf7);

/// Contributions this close to zero are drawn neutral.
pub const NEUTRAL_BAND: f64 = 1e-6;

/// Opacity of the square tint.
pub const TINT_OPACITY: f64 = 0.7;

// Red-blue diverging ramp, from just off neutral to the extreme.
const REDS: [Rgb; 5] =
    [Rgb(0xfd, 0xdb, 0xc7), Rgb(0xf4, 0xa5, 0x82), Rgb(0xd6, 0x60, 0x4d), Rgb(0xb2, 0x18, 0x2b), Rgb(0x67, 0x00, 0x1f)];
const BLUES: [Rgb; 5] =
    [Rgb(0xd1, 0xe5, 0xf0), Rgb(0x92, 0xc5, 0xde), Rgb(0x43, 0x93, 0xc3), Rgb(0x21, 0x66, 0xac), Rgb(0x05, 0x30, 0x61)];

/// Diverging scale: positive contributions (good for White) red, negative
/// blue, symmetric around zero over `[-max|φ|, +max|φ|]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorScale {
    max_abs: f64,
}

impl ColorScale {
    pub fn new(max_abs: f64) -> Self {
        ColorScale { max_abs: max_abs.abs() }
    }

    /// Scale spanning the largest contribution of `e`.
    pub fn for_explanation(e: &Explanation) -> Self {
        ColorScale::new(e.contributions.iter().map(|c| c.phi.abs()).fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn color_for_phi(&self, phi: f64) -> Rgb {
        if phi.is_nan() || phi.abs() <= NEUTRAL_BAND || self.max_abs <= NEUTRAL_BAND {
            return NEUTRAL;
        }
        let ramp = if phi > 0.0 { &REDS } else { &BLUES };
        let t = (phi.abs() / self.max_abs).clamp(0.0, 1.0) * (ramp.len() - 1) as f64;
        let lo = (t.floor() as usize).min(ramp.len() - 2);
        let frac = t - lo as f64;
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * frac).round() as u8;
        let (a, b) = (ramp[lo], ramp[lo + 1]);
        Rgb(mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
    }
}
