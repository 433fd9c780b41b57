//! Exact arithmetic in the number field Q(√3, √11).
//!
//! Every element is stored as four rational coefficients over the basis
//! `(1, √3, √11, √33)`. Since that basis is linearly independent over Q the
//! representation is unique, so structural equality is numeric equality.
//! Signs are decided by refining rational enclosures of the square roots,
//! never by floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Radicands of the irrational basis elements, in basis order.
const RADICANDS: [u32; 3] = [3, 11, 33];

/// `BASIS_PRODUCT[i][j] = (scale, k)` means `e_i * e_j = scale * e_k`.
const BASIS_PRODUCT: [[(i64, usize); 4]; 4] = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (3, 0), (1, 3), (3, 2)],
    [(1, 2), (1, 3), (11, 0), (11, 1)],
    [(1, 3), (3, 2), (11, 1), (33, 0)],
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseFieldError {
    #[error("expected {expected} rational coefficients, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("invalid rational `{0}`")]
    BadRational(String),
    #[error("point must have the form `x ; y`")]
    BadPoint,
}

/// Shorthand for the rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn parse_rational(token: &str) -> Result<Rational, ParseFieldError> {
    Rational::from_str(token).map_err(|_| ParseFieldError::BadRational(token.to_string()))
}

/// `a + b·√3 + c·√11 + d·√33`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    coeffs: [Rational; 4],
}

impl FieldElement {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        FieldElement {
            coeffs: [a, b, c, d],
        }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::new(r, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `q·√3`
    pub fn sqrt3_times(q: Rational) -> Self {
        Self::new(Rational::zero(), q, Rational::zero(), Rational::zero())
    }

    /// `q·√11`
    pub fn sqrt11_times(q: Rational) -> Self {
        Self::new(Rational::zero(), Rational::zero(), q, Rational::zero())
    }

    /// `q·√33`
    pub fn sqrt33_times(q: Rational) -> Self {
        Self::new(Rational::zero(), Rational::zero(), Rational::zero(), q)
    }

    /// Coefficients over `(1, √3, √11, √33)`.
    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, if the irrational coefficients vanish.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        FieldElement {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] * q),
        }
    }

    /// Rational enclosure `[lo, hi]` of the value, with each square root
    /// bracketed to within `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let mut lo = self.coeffs[0].clone();
        let mut hi = self.coeffs[0].clone();
        for (coeff, &n) in self.coeffs[1..].iter().zip(RADICANDS.iter()) {
            if coeff.is_zero() {
                continue;
            }
            let (root_lo, root_hi) = sqrt_enclosure(n, bits);
            if coeff.is_positive() {
                lo += coeff * &root_lo;
                hi += coeff * &root_hi;
            } else {
                lo += coeff * &root_hi;
                hi += coeff * &root_lo;
            }
        }
        (lo, hi)
    }

    /// Exact sign of the value relative to zero.
    pub fn signum(&self) -> Ordering {
        if let Some(r) = self.as_rational() {
            return r.cmp(&Rational::zero());
        }
        // A nonzero element is a nonzero real, so refinement terminates.
        let mut bits = 16;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    /// Exact ordering of `self` against a rational.
    pub fn cmp_to_rational(&self, r: &Rational) -> Ordering {
        let mut diff = self.clone();
        diff.coeffs[0] -= r;
        diff.signum()
    }

    /// Floating-point approximation. Never used for decisions on its own.
    pub fn to_f64(&self) -> f64 {
        const ROOTS: [f64; 4] = [1.0, 1.732_050_807_568_877_2, 3.316_624_790_355_4, 5.744_562_646_538_029];
        self.coeffs
            .iter()
            .zip(ROOTS)
            .map(|(c, root)| c.to_f64().unwrap_or(f64::NAN) * root)
            .sum()
    }

    /// Lexicographic order on the coefficient tuple. This is a canonical
    /// total order for indexing, not the numeric order.
    pub fn cmp_coefficients(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

/// `[lo, hi]` with `lo ≤ √n ≤ hi` and `hi - lo = 2^-bits`.
fn sqrt_enclosure(n: u32, bits: u32) -> (Rational, Rational) {
    let scale = BigInt::one() << bits;
    let scaled = BigInt::from(n) * &scale * &scale;
    let root = scaled.sqrt();
    let lo = Rational::new(root.clone(), scale.clone());
    let hi = Rational::new(root + 1, scale);
    (lo, hi)
}

/// Smallest dyadic rational with denominator `2^bits` that is `≥ √q`, for
/// `q ≥ 0`.
pub fn sqrt_upper_bound(q: &Rational, bits: u32) -> Rational {
    assert!(!q.is_negative(), "square root of a negative rational");
    let scale = BigInt::one() << bits;
    let scaled = q * Rational::from_integer(&scale * &scale);
    let ceil = scaled.ceil().to_integer();
    let mut root = ceil.sqrt();
    if &root * &root < ceil {
        root += 1;
    }
    Rational::new(root, scale)
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}/{}", c.numer(), c.denom())?;
        }
        Ok(())
    }
}

impl FromStr for FieldElement {
    type Err = ParseFieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(ParseFieldError::WrongArity {
                expected: 4,
                found: tokens.len(),
            });
        }
        Ok(FieldElement::new(
            parse_rational(tokens[0])?,
            parse_rational(tokens[1])?,
            parse_rational(tokens[2])?,
            parse_rational(tokens[3])?,
        ))
    }
}

impl Add<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &rhs.coeffs[i]),
        }
    }
}

impl Sub<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] - &rhs.coeffs[i]),
        }
    }
}

impl Mul<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        let mut out: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (scale, k) = BASIS_PRODUCT[i][j];
                let term = a * b;
                if scale == 1 {
                    out[k] += term;
                } else {
                    out[k] += term * Rational::from_integer(BigInt::from(scale));
                }
            }
        }
        FieldElement { coeffs: out }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            coeffs: std::array::from_fn(|i| -&self.coeffs[i]),
        }
    }
}

macro_rules! forward_owned {
    ($imp:ident, $method:ident) => {
        impl $imp<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $imp<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// A point of the plane with coordinates in Q(√3, √11).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Point {
    pub x: FieldElement,
    pub y: FieldElement,
}

impl Point {
    pub fn new(x: FieldElement, y: FieldElement) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(FieldElement::zero(), FieldElement::zero())
    }

    pub fn dist_sq(&self, other: &Point) -> FieldElement {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }

    pub fn norm_sq(&self) -> FieldElement {
        &self.x * &self.x + &self.y * &self.y
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl Add<&Point> for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        self.x
            .cmp_coefficients(&other.x)
            .then_with(|| self.y.cmp_coefficients(&other.y))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ; {}", self.x, self.y)
    }
}

impl FromStr for Point {
    type Err = ParseFieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s.split_once(';').ok_or(ParseFieldError::BadPoint)?;
        Ok(Point::new(x.parse()?, y.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt3() -> FieldElement {
        FieldElement::sqrt3_times(ratio(1, 1))
    }

    fn r_hex() -> FieldElement {
        // (√3 + √11) / 6
        FieldElement::new(ratio(0, 1), ratio(1, 6), ratio(1, 6), ratio(0, 1))
    }

    #[test]
    fn additive_identity() {
        let x = FieldElement::new(ratio(2, 3), ratio(-1, 5), ratio(7, 2), ratio(1, 9));
        assert_eq!(&x + &FieldElement::zero(), x);
    }

    #[test]
    fn sqrt3_squared_is_three() {
        assert_eq!(&sqrt3() * &sqrt3(), FieldElement::from_int(3));
    }

    #[test]
    fn square_of_hex_radius() {
        // (3 + 2√33 + 11) / 36
        let expected = FieldElement::new(ratio(7, 18), ratio(0, 1), ratio(0, 1), ratio(1, 18));
        assert_eq!(&r_hex() * &r_hex(), expected);
    }

    #[test]
    fn basis_products() {
        let s3 = sqrt3();
        let s11 = FieldElement::sqrt11_times(ratio(1, 1));
        let s33 = FieldElement::sqrt33_times(ratio(1, 1));
        assert_eq!(&s3 * &s11, s33);
        assert_eq!(&s3 * &s33, FieldElement::sqrt11_times(ratio(3, 1)));
        assert_eq!(&s11 * &s33, FieldElement::sqrt3_times(ratio(11, 1)));
        assert_eq!(&s33 * &s33, FieldElement::from_int(33));
    }

    #[test]
    fn distances() {
        let o = Point::origin();
        let e = Point::new(FieldElement::one(), FieldElement::zero());
        assert_eq!(o.dist_sq(&e), FieldElement::one());
        let p = Point::new(
            FieldElement::from_rational(ratio(5, 6)),
            FieldElement::sqrt11_times(ratio(1, 6)),
        );
        assert_eq!(o.dist_sq(&p), FieldElement::one());
        let q = Point::new(
            FieldElement::from_rational(ratio(1, 2)),
            FieldElement::sqrt3_times(ratio(1, 2)),
        );
        assert_eq!(o.dist_sq(&q), FieldElement::one());
    }

    #[test]
    fn comparisons() {
        assert_eq!(FieldElement::one().cmp_to_rational(&ratio(1, 1)), Ordering::Equal);
        assert_eq!(sqrt3().cmp_to_rational(&ratio(2, 1)), Ordering::Less);
        let u = FieldElement::new(ratio(7, 18), ratio(0, 1), ratio(0, 1), ratio(1, 18));
        assert_eq!(u.cmp_to_rational(&ratio(1, 1)), Ordering::Less);
        assert_eq!((-&sqrt3()).cmp_to_rational(&ratio(-17, 10)), Ordering::Less);
        assert_eq!((-&sqrt3()).cmp_to_rational(&ratio(-173, 100)), Ordering::Less);
        assert_eq!((-&sqrt3()).cmp_to_rational(&ratio(-174, 100)), Ordering::Greater);
    }

    #[test]
    fn near_cancellation_is_resolved() {
        // √33 - √3·√11 = 0 exactly, √33 - 5745/1000 is tiny but negative.
        let s33 = FieldElement::sqrt33_times(ratio(1, 1));
        assert_eq!(s33.cmp_to_rational(&ratio(57_445_626_465, 10_000_000_000)), Ordering::Greater);
        assert_eq!(s33.cmp_to_rational(&ratio(57_445_626_466, 10_000_000_000)), Ordering::Less);
    }

    #[test]
    fn sqrt_upper_bounds() {
        let b = sqrt_upper_bound(&ratio(4, 1), 10);
        assert_eq!(b, ratio(2, 1));
        let b = sqrt_upper_bound(&ratio(2, 1), 20);
        assert!(&b * &b >= ratio(2, 1));
        assert!(b < ratio(14143, 10000));
    }

    #[test]
    fn render_and_parse() {
        let p = Point::new(r_hex(), FieldElement::from_rational(ratio(-3, 4)));
        let text = p.to_string();
        assert_eq!(text, "0/1 1/6 1/6 0/1 ; -3/4 0/1 0/1 0/1");
        assert_eq!(text.parse::<Point>().unwrap(), p);
        assert!("1 2 3".parse::<FieldElement>().is_err());
        assert!("1 2 3 x".parse::<FieldElement>().is_err());
    }
}
