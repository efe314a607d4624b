//! Exact rational scalars, points, lines and the orientation predicate.
//!
//! Every coordinate in the crate is a [`Scalar`], an arbitrary-precision
//! reduced fraction. All constructions used by the solvers (line
//! intersections, path crossings, envelope breakpoints) are linear, so they
//! stay inside the rationals and no predicate ever needs a tolerance.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("points coincide; no unique line passes through them")]
    CoincidentPoints,
    #[error("lines are parallel or identical")]
    ParallelLines,
    #[error("line is vertical")]
    VerticalLine,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number {input:?}: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

/// Integer shorthand.
pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

/// `num / den` as a reduced fraction. Panics if `den == 0`.
pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Parses an integer, a decimal (`-0.125`, `3.`, `.5`, optional `e`
/// exponent) or a fraction `p/q` into an exact scalar.
pub fn parse_scalar(input: &str) -> Result<Scalar, ParseScalarError> {
    let err = |reason| ParseScalarError {
        input: input.to_string(),
        reason,
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err("bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Scalar::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| err("bad exponent"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(err("no digits"));
    }
    if !whole.bytes().chain(fraction.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err("unexpected character"));
    }
    let combined = format!("{whole}{fraction}");
    let mut numer: BigInt = combined.parse().map_err(|_| err("no digits"))?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - i32::try_from(fraction.len()).map_err(|_| err("too many digits"))?;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Scalar::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Scalar::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_scalar(v: &Scalar) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Decimal rendering with `digits` significant digits, rounded half away from zero.
pub fn format_decimal(v: &Scalar, digits: usize) -> String {
    assert!(digits > 0);
    if v.is_zero() {
        return "0".to_string();
    }
    let negative = v.is_negative();
    let abs = v.abs();
    let ten = BigInt::from(10);
    // Find the exponent e with 10^e <= abs < 10^(e+1).
    let mut exp: i64 = 0;
    let mut probe = Scalar::one();
    let ten_r = Scalar::from_integer(ten.clone());
    while abs >= &probe * &ten_r {
        probe = &probe * &ten_r;
        exp += 1;
    }
    while abs < probe {
        probe = &probe / &ten_r;
        exp -= 1;
    }
    // Scale so that the integer part carries exactly `digits` digits.
    let shift = digits as i64 - 1 - exp;
    let scaled = if shift >= 0 {
        &abs * Scalar::from_integer(num_traits::pow(ten.clone(), shift as usize))
    } else {
        &abs / Scalar::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
    };
    let half = frac(1, 2);
    let mut rounded = (scaled + half).floor().to_integer();
    let mut shift = shift;
    if rounded.to_string().len() > digits {
        rounded /= &ten;
        shift -= 1;
    }
    let text = rounded.to_string();
    let body = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{text}{zeros}")
    } else if (shift as usize) < text.len() {
        let split = text.len() - shift as usize;
        format!("{}.{}", &text[..split], &text[split..])
    } else {
        let zeros = "0".repeat(shift as usize - text.len());
        format!("0.{zeros}{text}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Lossy conversion for rendering and timing-free reporting only.
pub fn to_f64(v: &Scalar) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(int(x), int(y))
    }

    pub fn squared_distance(&self, other: &Point2) -> Scalar {
        let dx = &other.x - &self.x;
        let dy = &other.y - &self.y;
        &dx * &dx + &dy * &dy
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        to_f64(&self.squared_distance(other)).sqrt()
    }

    /// Mirror across the y axis.
    pub fn mirrored(&self) -> Point2 {
        Point2::new(-&self.x, self.y.clone())
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_scalar(&self.x), format_scalar(&self.y))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl Point3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Self { x, y, z }
    }

    pub fn xy(&self) -> Point2 {
        Point2::new(self.x.clone(), self.y.clone())
    }

    pub fn squared_distance(&self, other: &Point3) -> Scalar {
        let dx = &other.x - &self.x;
        let dy = &other.y - &self.y;
        let dz = &other.z - &self.z;
        &dx * &dx + &dy * &dy + &dz * &dz
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            format_scalar(&self.x),
            format_scalar(&self.y),
            format_scalar(&self.z)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Counterclockwise.
    Left,
    /// Clockwise.
    Right,
    Collinear,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::Left => Orientation::Right,
            Orientation::Right => Orientation::Left,
            Orientation::Collinear => Orientation::Collinear,
        }
    }
}

/// `v` as a machine integer, when it is an integer below `2^62` in magnitude.
fn small_int(v: &Scalar) -> Option<i128> {
    if !v.denom().is_one() {
        return None;
    }
    v.numer()
        .to_i64()
        .filter(|x| x.unsigned_abs() < 1 << 62)
        .map(i128::from)
}

/// Integer-coordinate cross product without any big-number work.
fn cross_small(p: &Point2, q: &Point2, r: &Point2) -> Option<i128> {
    let (px, py) = (small_int(&p.x)?, small_int(&p.y)?);
    let (qx, qy) = (small_int(&q.x)?, small_int(&q.y)?);
    let (rx, ry) = (small_int(&r.x)?, small_int(&r.y)?);
    Some((qx - px) * (ry - py) - (qy - py) * (rx - px))
}

/// Twice the signed area of the triangle `pqr`.
pub fn cross(p: &Point2, q: &Point2, r: &Point2) -> Scalar {
    if let Some(v) = cross_small(p, q, r) {
        return Scalar::from_integer(BigInt::from(v));
    }
    (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
}

/// `a - b` as an unreduced fraction with positive denominator.
fn sub_unreduced(a: &Scalar, b: &Scalar) -> (BigInt, BigInt) {
    if a.denom() == b.denom() {
        return (a.numer() - b.numer(), a.denom().clone());
    }
    (a.numer() * b.denom() - b.numer() * a.denom(), a.denom() * b.denom())
}

/// `(q - p)·(r - p)`.
pub fn dot(p: &Point2, q: &Point2, r: &Point2) -> Scalar {
    (&q.x - &p.x) * (&r.x - &p.x) + (&q.y - &p.y) * (&r.y - &p.y)
}

pub fn orientation(p: &Point2, q: &Point2, r: &Point2) -> Orientation {
    let ord = match cross_small(p, q, r) {
        Some(v) => v.cmp(&0),
        None => {
            // Sign only, so skip the gcd reductions of rational arithmetic.
            let (ax, adx) = sub_unreduced(&q.x, &p.x);
            let (by, bdy) = sub_unreduced(&r.y, &p.y);
            let (ay, ady) = sub_unreduced(&q.y, &p.y);
            let (bx, bdx) = sub_unreduced(&r.x, &p.x);
            (ax * by * &ady * &bdx).cmp(&(ay * bx * adx * bdy))
        }
    };
    match ord {
        Ordering::Greater => Orientation::Left,
        Ordering::Less => Orientation::Right,
        Ordering::Equal => Orientation::Collinear,
    }
}

/// The line `a·x + b·y = c` with integer coefficients.
///
/// Coefficients are divided by their gcd and the first nonzero of `(a, b)` is
/// positive, so two `Line2` values compare equal exactly when they describe
/// the same geometric line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl Line2 {
    /// Normalizes arbitrary rational coefficients. `None` if `a = b = 0`.
    pub fn from_coefficients(a: &Scalar, b: &Scalar, c: &Scalar) -> Option<Line2> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        let lcm = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = Scalar::from_integer(lcm);
        let mut a = (a * &scale).to_integer();
        let mut b = (b * &scale).to_integer();
        let mut c = (c * &scale).to_integer();
        let g = a.gcd(&b).gcd(&c);
        a /= &g;
        b /= &g;
        c /= &g;
        let lead_negative = if a.is_zero() { b.is_negative() } else { a.is_negative() };
        if lead_negative {
            a = -a;
            b = -b;
            c = -c;
        }
        Some(Line2 { a, b, c })
    }

    /// The line `y = slope·x + intercept`.
    pub fn from_slope_intercept(slope: &Scalar, intercept: &Scalar) -> Line2 {
        Line2::from_coefficients(&-slope, &Scalar::one(), intercept)
            .expect("b = 1 is nonzero")
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    pub fn is_vertical(&self) -> bool {
        self.b.is_zero()
    }

    pub fn contains(&self, p: &Point2) -> bool {
        self.eval(p).is_zero()
    }

    /// `a·x + b·y − c`: positive on one side, negative on the other.
    pub fn eval(&self, p: &Point2) -> Scalar {
        Scalar::from_integer(self.a.clone()) * &p.x + Scalar::from_integer(self.b.clone()) * &p.y
            - Scalar::from_integer(self.c.clone())
    }

    pub fn slope(&self) -> Result<Scalar, GeomError> {
        if self.is_vertical() {
            return Err(GeomError::VerticalLine);
        }
        Ok(Scalar::new(-self.a.clone(), self.b.clone()))
    }

    pub fn intercept(&self) -> Result<Scalar, GeomError> {
        if self.is_vertical() {
            return Err(GeomError::VerticalLine);
        }
        Ok(Scalar::new(self.c.clone(), self.b.clone()))
    }
}

impl fmt::Display for Line2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·x + {}·y = {}", self.a, self.b, self.c)
    }
}

pub fn line_through(p: &Point2, q: &Point2) -> Result<Line2, GeomError> {
    if p == q {
        return Err(GeomError::CoincidentPoints);
    }
    let a = &q.y - &p.y;
    let b = &p.x - &q.x;
    let c = &a * &p.x + &b * &p.y;
    Ok(Line2::from_coefficients(&a, &b, &c).expect("distinct points give a nonzero normal"))
}

pub fn intersect_lines(l1: &Line2, l2: &Line2) -> Result<Point2, GeomError> {
    let det = &l1.a * &l2.b - &l1.b * &l2.a;
    if det.is_zero() {
        return Err(GeomError::ParallelLines);
    }
    let x = &l1.c * &l2.b - &l1.b * &l2.c;
    let y = &l1.a * &l2.c - &l1.c * &l2.a;
    Ok(Point2::new(
        Scalar::new(x, det.clone()),
        Scalar::new(y, det),
    ))
}

pub fn y_at(l: &Line2, x: &Scalar) -> Result<Scalar, GeomError> {
    if l.is_vertical() {
        return Err(GeomError::VerticalLine);
    }
    let a = Scalar::from_integer(l.a.clone());
    let c = Scalar::from_integer(l.c.clone());
    Ok((c - a * x) / Scalar::from_integer(l.b.clone()))
}

/// Height at `x` of the non-vertical line through `p` and `q` (`p.x != q.x`).
pub(crate) fn interpolate(p: &Point2, q: &Point2, x: &Scalar) -> Scalar {
    debug_assert!(p.x != q.x);
    &p.y + (&q.y - &p.y) * (x - &p.x) / (&q.x - &p.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(2, 0)), Orientation::Collinear);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(1, 1)), Orientation::Left);
        assert_eq!(orientation(&p(0, 0), &p(1, 0), &p(1, -1)), Orientation::Right);
        assert_eq!(orientation(&p(3, 3), &p(3, 3), &p(3, 3)), Orientation::Collinear);
    }

    #[test]
    fn line_through_examples() {
        let l = line_through(&p(0, 0), &p(1, 1)).unwrap();
        assert_eq!((l.a(), l.b(), l.c()), (&BigInt::from(1), &BigInt::from(-1), &BigInt::from(0)));
        let l = line_through(&p(0, 2), &p(2, 2)).unwrap();
        assert_eq!((l.a(), l.b(), l.c()), (&BigInt::from(0), &BigInt::from(1), &BigInt::from(2)));
        let l = line_through(&p(1, 0), &p(1, 5)).unwrap();
        assert_eq!((l.a(), l.b(), l.c()), (&BigInt::from(1), &BigInt::from(0), &BigInt::from(1)));
        assert_eq!(line_through(&p(1, 1), &p(1, 1)), Err(GeomError::CoincidentPoints));
    }

    #[test]
    fn normalization_is_unique() {
        let l1 = line_through(&p(0, 0), &p(2, 2)).unwrap();
        let l2 = line_through(&p(5, 5), &p(-3, -3)).unwrap();
        assert_eq!(l1, l2);
        let l3 = Line2::from_coefficients(&frac(-1, 3), &frac(1, 3), &int(0)).unwrap();
        assert_eq!(l1, l3);
    }

    #[test]
    fn intersect_examples() {
        let diag = Line2::from_slope_intercept(&int(1), &int(0));
        let anti = Line2::from_slope_intercept(&int(-1), &int(2));
        assert_eq!(intersect_lines(&diag, &anti).unwrap(), p(1, 1));
        let shifted = Line2::from_slope_intercept(&int(1), &int(1));
        assert_eq!(intersect_lines(&diag, &shifted), Err(GeomError::ParallelLines));
        assert_eq!(intersect_lines(&diag, &diag), Err(GeomError::ParallelLines));
        // y = 2 − 2x against y = 2x − 2: 4x = 4.
        let down = Line2::from_slope_intercept(&int(-2), &int(2));
        let up = Line2::from_slope_intercept(&int(2), &int(-2));
        assert_eq!(intersect_lines(&down, &up).unwrap(), p(1, 0));
    }

    #[test]
    fn y_at_examples() {
        let anti = Line2::from_slope_intercept(&int(-1), &int(2));
        assert_eq!(y_at(&anti, &int(0)).unwrap(), int(2));
        let diag = line_through(&p(0, 0), &p(1, 1)).unwrap();
        assert_eq!(y_at(&diag, &int(7)).unwrap(), int(7));
        let vertical = line_through(&p(1, 0), &p(1, 5)).unwrap();
        assert_eq!(y_at(&vertical, &int(1)), Err(GeomError::VerticalLine));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_scalar("3").unwrap(), int(3));
        assert_eq!(parse_scalar("-0.125").unwrap(), frac(-1, 8));
        assert_eq!(parse_scalar("1/3").unwrap(), frac(1, 3));
        assert_eq!(parse_scalar(" 4/-6 ").unwrap(), frac(-2, 3));
        assert_eq!(parse_scalar(".5").unwrap(), frac(1, 2));
        assert_eq!(parse_scalar("2.5e2").unwrap(), int(250));
        assert_eq!(parse_scalar("15e-1").unwrap(), frac(3, 2));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("-").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&frac(3, 2), 12), "1.50000000000");
        assert_eq!(format_decimal(&frac(1, 3), 12), "0.333333333333");
        assert_eq!(format_decimal(&frac(2, 3), 4), "0.6667");
        assert_eq!(format_decimal(&int(0), 12), "0");
        assert_eq!(format_decimal(&frac(-5, 1), 3), "-5.00");
        assert_eq!(format_decimal(&int(123456), 3), "123000");
        assert_eq!(format_decimal(&frac(9999, 10000), 3), "1.00");
        assert_eq!(format_decimal(&frac(1, 800), 2), "0.0013");
    }

    fn small_point() -> impl Strategy<Value = Point2> {
        (-50i64..50, 1i64..7, -50i64..50, 1i64..7)
            .prop_map(|(xn, xd, yn, yd)| Point2::new(frac(xn, xd), frac(yn, yd)))
    }

    proptest! {
        #[test]
        fn orientation_antisymmetric(a in small_point(), b in small_point(), c in small_point()) {
            prop_assert_eq!(orientation(&a, &b, &c), orientation(&a, &c, &b).reversed());
        }

        #[test]
        fn fast_paths_match_rational_arithmetic(a in small_point(), b in small_point(), c in small_point(), big in any::<bool>()) {
            let lift = |p: &Point2| if big {
                Point2::new(&p.x * int(1 << 40), &p.y * int(1 << 40))
            } else {
                p.clone()
            };
            let (a, b, c) = (lift(&a), lift(&b), lift(&c));
            let direct = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
            prop_assert_eq!(cross(&a, &b, &c), direct.clone());
            let expected = match direct.cmp(&Scalar::zero()) {
                Ordering::Greater => Orientation::Left,
                Ordering::Less => Orientation::Right,
                Ordering::Equal => Orientation::Collinear,
            };
            prop_assert_eq!(orientation(&a, &b, &c), expected);
            let (ia, ib, ic) = (
                Point2::new(a.x.floor(), a.y.floor()),
                Point2::new(b.x.floor(), b.y.floor()),
                Point2::new(c.x.floor(), c.y.floor()),
            );
            let direct = (&ib.x - &ia.x) * (&ic.y - &ia.y) - (&ib.y - &ia.y) * (&ic.x - &ia.x);
            prop_assert_eq!(cross(&ia, &ib, &ic), direct);
        }

        #[test]
        fn line_contains_generators(a in small_point(), b in small_point()) {
            prop_assume!(a != b);
            let l = line_through(&a, &b).unwrap();
            prop_assert!(l.contains(&a));
            prop_assert!(l.contains(&b));
            prop_assert_eq!(l.clone(), line_through(&b, &a).unwrap());
        }

        #[test]
        fn intersection_lies_on_both(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
            prop_assume!(a != b && c != d);
            let l1 = line_through(&a, &b).unwrap();
            let l2 = line_through(&c, &d).unwrap();
            if let Ok(x) = intersect_lines(&l1, &l2) {
                prop_assert!(l1.contains(&x));
                prop_assert!(l2.contains(&x));
            }
        }

        #[test]
        fn format_parse_round_trip(n in -1000i64..1000, d in 1i64..50) {
            let v = frac(n, d);
            prop_assert_eq!(parse_scalar(&format_scalar(&v)).unwrap(), v);
        }
    }
}
