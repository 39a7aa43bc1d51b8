//! Lifted Möbius transformations on the boundary circle.
//!
//! The half-plane boundary ℝ ∪ {∞} is identified with the unit circle by
//! the Cayley map U(z) = (i - z)/(z + i), so a boundary coordinate x
//! corresponds to the angle φ with x = tan(φ/2) (and ∞ ↔ φ ≡ π mod 2π).
//! Group elements are kept as words over two generators:
//!
//! * `Rotation(α)`: rotation of the disk about 0; on lifted angles this is
//!   the translation φ ↦ φ + α.
//! * `Affine(a, b)`: the half-plane map x ↦ a(x + b) with a > 0; its lift
//!   is fixed canonically by requiring it to fix π (the affine map fixes
//!   the boundary point -1 of the disk).
//!
//! Storing words instead of matrices makes every lift canonical
//! per-generator, so compositions never acquire winding ambiguities: the
//! lifted action is always strictly increasing and 2π-quasiperiodic.

use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// A point of the half-plane boundary ℝ ∪ {∞}.
///
/// ∞ is a first-class value; Möbius arithmetic treats it by the usual
/// conventions ((a·∞ + b)/(c·∞ + d) = a/c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    /// Finite value, if any.
    pub fn finite(&self) -> Option<f64> {
        match self {
            BoundaryPoint::Finite(x) => Some(*x),
            BoundaryPoint::Infinity => None,
        }
    }
}

impl From<f64> for BoundaryPoint {
    fn from(x: f64) -> Self {
        BoundaryPoint::Finite(x)
    }
}

/// One generator of the lifted group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Disk rotation by `alpha`; lifted action φ ↦ φ + α.
    Rotation(f64),
    /// Half-plane affine map x ↦ a(x + b), a > 0; lift fixes π.
    Affine { a: f64, b: f64 },
}

impl Generator {
    fn inverse(self) -> Generator {
        match self {
            Generator::Rotation(alpha) => Generator::Rotation(-alpha),
            // y = a(x + b)  =>  x = (1/a)(y - a b)
            Generator::Affine { a, b } => Generator::Affine { a: 1.0 / a, b: -a * b },
        }
    }
}

/// An element of the lifted Möbius group, stored as a generator word.
/// Words act left to right: `x * T` folds the generators in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LiftedMoebius {
    word: Vec<Generator>,
}

/// Map a lifted angle to its boundary coordinate tan(φ/2), with the odd
/// multiples of π going to ∞.
pub fn cayley_inv(phi: f64) -> BoundaryPoint {
    let (principal, _) = principal_cell(phi);
    if principal == PI {
        BoundaryPoint::Infinity
    } else {
        BoundaryPoint::Finite((principal / 2.0).tan())
    }
}

/// Principal lifted angle of a boundary point, in (-π, π].
///
/// cayley(0) = 0, cayley(∞) = π, strictly increasing on ℝ.
pub fn cayley(x: BoundaryPoint) -> f64 {
    match x {
        BoundaryPoint::Finite(v) => 2.0 * v.atan(),
        BoundaryPoint::Infinity => PI,
    }
}

/// Split φ = φ₀ + 2πk with φ₀ ∈ (-π, π]. Returns (φ₀, 2πk).
fn principal_cell(phi: f64) -> (f64, f64) {
    if phi > -PI && phi <= PI {
        return (phi, 0.0);
    }
    let k = ((phi - PI) / TWO_PI).ceil();
    let base = TWO_PI * k;
    let mut p = phi - base;
    // guard the cell boundaries against rounding
    if p <= -PI {
        p += TWO_PI;
        return (p, base - TWO_PI);
    }
    if p > PI {
        p -= TWO_PI;
        return (p, base + TWO_PI);
    }
    (p, base)
}

fn apply_generator_boundary(g: Generator, x: BoundaryPoint) -> BoundaryPoint {
    match g {
        Generator::Rotation(alpha) => {
            let phi = cayley(x) + alpha;
            cayley_inv(phi)
        }
        Generator::Affine { a, b } => match x {
            BoundaryPoint::Finite(v) => BoundaryPoint::Finite(a * (v + b)),
            BoundaryPoint::Infinity => BoundaryPoint::Infinity,
        },
    }
}

/// Lift of the disk rotation by `alpha`: φ ↦ φ + α.
#[inline]
pub fn rotate_lifted(phi: f64, alpha: f64) -> f64 {
    phi + alpha
}

/// Canonical lift of the affine map x ↦ a(x + b), a > 0: each cell
/// (-π + 2πk, π + 2πk] maps to itself and π + 2πk stays fixed.
#[inline]
pub fn affine_lifted(phi: f64, a: f64, b: f64) -> f64 {
    let (p, base) = principal_cell(phi);
    if p == PI {
        // the lift fixes π and hence every π + 2πk
        return phi;
    }
    2.0 * (a * ((p / 2.0).tan() + b)).atan() + base
}

fn apply_generator_lifted(g: Generator, phi: f64) -> f64 {
    match g {
        Generator::Rotation(alpha) => rotate_lifted(phi, alpha),
        Generator::Affine { a, b } => affine_lifted(phi, a, b),
    }
}

impl LiftedMoebius {
    /// The identity word.
    pub fn identity() -> Self {
        LiftedMoebius { word: Vec::new() }
    }

    pub fn rotation(alpha: f64) -> Self {
        LiftedMoebius { word: vec![Generator::Rotation(alpha)] }
    }

    /// Affine map x ↦ a(x + b). Panics if a <= 0 or not finite.
    pub fn affine(a: f64, b: f64) -> Self {
        assert!(a > 0.0 && a.is_finite() && b.is_finite(), "affine scale must be positive and finite");
        LiftedMoebius { word: vec![Generator::Affine { a, b }] }
    }

    pub fn from_word(word: Vec<Generator>) -> Self {
        for g in &word {
            if let Generator::Affine { a, b } = g {
                assert!(*a > 0.0 && a.is_finite() && b.is_finite());
            }
        }
        LiftedMoebius { word }
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    pub fn is_identity_word(&self) -> bool {
        self.word.is_empty()
    }

    /// Composition: `x * (S.then(T)) == (x * S) * T`.
    pub fn then(&self, other: &LiftedMoebius) -> LiftedMoebius {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        LiftedMoebius { word }
    }

    /// Inverse word: reversed order, each generator inverted.
    pub fn inverse(&self) -> LiftedMoebius {
        LiftedMoebius {
            word: self.word.iter().rev().map(|g| g.inverse()).collect(),
        }
    }

    /// Conjugation `self^other = other⁻¹ · self · other`.
    pub fn conjugated_by(&self, other: &LiftedMoebius) -> LiftedMoebius {
        other.inverse().then(self).then(other)
    }

    /// Action on the half-plane boundary.
    pub fn apply_boundary(&self, x: BoundaryPoint) -> BoundaryPoint {
        self.word.iter().fold(x, |acc, &g| apply_generator_boundary(g, acc))
    }

    /// Action on lifted angles (the universal cover of the circle).
    pub fn apply_lifted(&self, phi: f64) -> f64 {
        self.word.iter().fold(phi, |acc, &g| apply_generator_lifted(g, acc))
    }
}

/// Angular shift of the pair (x, y) under T:
/// `ash(T, x, y) = (y*T - x*T) - (y - x)`.
///
/// Zero whenever x = y or T is a pure rotation.
pub fn ash(t: &LiftedMoebius, x: f64, y: f64) -> f64 {
    (t.apply_lifted(y) - t.apply_lifted(x)) - (y - x)
}
