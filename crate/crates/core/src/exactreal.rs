//! Exact arithmetic on rational linear combinations of square roots.
//!
//! An [`ExactReal`] is `q_0 + q_1*sqrt(d_1) + ... + q_m*sqrt(d_m)` where every
//! `d_i > 1` is square-free and every stored `q_i` is nonzero. Square roots of
//! distinct square-free integers are linearly independent over the rationals,
//! so this canonical form makes equality structural and makes rational
//! independence of a family decidable by a rank computation.
//!
//! Floors and signs are certified by interval refinement with big integers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

const INITIAL_BITS: u64 = 64;

/// Converts a finite `f64` to the rational it denotes exactly.
///
/// Panics on NaN or infinity.
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("non-finite float has no rational value")
}

/// Converts a rational to the nearest `f64`.
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Only reachable for magnitudes beyond f64 range.
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactReal {
    rational: Rational,
    surds: BTreeMap<u64, Rational>,
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(q: Rational) -> Self {
        ExactReal {
            rational: q,
            surds: BTreeMap::new(),
        }
    }

    /// The exact rational value of a finite float.
    pub fn from_f64(x: f64) -> Self {
        Self::from_rational(rational_from_f64(x))
    }

    /// `sqrt(n)` in canonical form: `n = s^2 * d` becomes `s*sqrt(d)`.
    pub fn sqrt(n: u64) -> Self {
        let (outer, core) = square_free_split(n);
        let outer = Rational::from_integer(BigInt::from(outer));
        if core == 1 {
            Self::from_rational(outer)
        } else {
            Self::surd(outer, core)
        }
    }

    /// `sqrt(q)` for a nonnegative rational `q = a/b`, written as `sqrt(a*b)/b`.
    pub fn sqrt_rational(q: &Rational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        let a = q.numer().to_u64()?;
        let b = q.denom().to_u64()?;
        let ab = a.checked_mul(b)?;
        let inv_b = Rational::new(BigInt::one(), BigInt::from(b));
        Some(Self::sqrt(ab).scale(&inv_b))
    }

    /// `coeff * sqrt(d)`. `d` must be square-free and greater than one.
    pub fn surd(coeff: Rational, d: u64) -> Self {
        assert!(d > 1 && is_square_free(d), "radicand {d} is not square-free");
        let mut surds = BTreeMap::new();
        if !coeff.is_zero() {
            surds.insert(d, coeff);
        }
        ExactReal {
            rational: Rational::zero(),
            surds,
        }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    /// Map from square-free radicand to its (nonzero) coefficient.
    pub fn surd_coeffs(&self) -> &BTreeMap<u64, Rational> {
        &self.surds
    }

    pub fn is_zero(&self) -> bool {
        self.surds.is_empty() && self.rational.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surds.is_empty()
    }

    pub fn is_integer(&self) -> bool {
        self.surds.is_empty() && self.rational.is_integer()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ExactReal {
            rational: &self.rational * c,
            surds: self.surds.iter().map(|(&d, q)| (d, q * c)).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(k)))
    }

    /// A rational enclosure `lo <= self <= hi` whose width is at most
    /// `sum |q_i| * 2^-bits`. When `self` has a surd part the bounds are strict.
    pub fn enclose(&self, bits: u64) -> (Rational, Rational) {
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        let denom = Rational::from_integer(BigInt::one() << bits);
        for (&d, q) in &self.surds {
            let s = (BigUint::from(d) << (2 * bits)).sqrt();
            let below = Rational::from_integer(BigInt::from(s.clone())) / &denom;
            let above = Rational::from_integer(BigInt::from(s + 1u32)) / &denom;
            if q.is_positive() {
                lo += q * &below;
                hi += q * &above;
            } else {
                lo += q * &above;
                hi += q * &below;
            }
        }
        (lo, hi)
    }

    fn enclosure_width_bound(&self, bits: u64) -> Rational {
        let total: Rational = self.surds.values().map(|q| q.abs()).sum();
        total / Rational::from_integer(BigInt::one() << bits)
    }

    /// Certified floor: the greatest integer not exceeding `self`.
    pub fn floor(&self) -> BigInt {
        if self.surds.is_empty() {
            return self.rational.floor().to_integer();
        }
        let mut bits = INITIAL_BITS;
        loop {
            let (lo, hi) = self.enclose(bits);
            let f_lo = lo.floor();
            if f_lo == hi.floor() {
                return f_lo.to_integer();
            }
            bits *= 2;
        }
    }

    /// `[|self|]`, the floor of the absolute value.
    pub fn floor_abs(&self) -> BigInt {
        self.abs().floor()
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn fractional_part(&self) -> Self {
        let fl = Rational::from_integer(self.floor());
        let frac = ExactReal {
            rational: &self.rational - fl,
            surds: self.surds.clone(),
        };
        debug_assert!(!frac.is_negative() && frac < Self::one());
        frac
    }

    pub fn signum(&self) -> Ordering {
        if self.surds.is_empty() {
            return self.rational.cmp(&Rational::zero());
        }
        // A nonempty surd part makes the value irrational, hence nonzero.
        let zero = Rational::zero();
        let mut bits = INITIAL_BITS;
        loop {
            let (lo, hi) = self.enclose(bits);
            if lo >= zero {
                return Ordering::Greater;
            }
            if hi <= zero {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// An `f64` within `abs_err` of `self`, plus the final rounding to `f64`
    /// (half an ulp of the result), which no finite precision can remove.
    pub fn to_float(&self, abs_err: f64) -> f64 {
        assert!(abs_err > 0.0, "abs_err must be positive");
        if self.surds.is_empty() {
            return rational_to_f64(&self.rational);
        }
        let half = rational_from_f64(abs_err) / Rational::from_integer(BigInt::from(2));
        let mut bits = INITIAL_BITS;
        while self.enclosure_width_bound(bits) > half {
            bits *= 2;
        }
        let (lo, hi) = self.enclose(bits);
        rational_to_f64(&((lo + hi) / Rational::from_integer(BigInt::from(2))))
    }

    /// Nearest-ish `f64`, accurate to far below one ulp before rounding.
    pub fn to_f64(&self) -> f64 {
        if self.surds.is_empty() {
            return rational_to_f64(&self.rational);
        }
        let (lo, hi) = self.enclose(128);
        rational_to_f64(&((lo + hi) / Rational::from_integer(BigInt::from(2))))
    }

    fn add_surd(&mut self, d: u64, q: Rational) {
        if q.is_zero() {
            return;
        }
        let entry = self.surds.entry(d).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.surds.remove(&d);
        }
    }

    fn mul_ref(&self, rhs: &ExactReal) -> ExactReal {
        let mut out = ExactReal::from_rational(&self.rational * &rhs.rational);
        for (&d, q) in &rhs.surds {
            out.add_surd(d, &self.rational * q);
        }
        for (&d, q) in &self.surds {
            out.add_surd(d, &rhs.rational * q);
        }
        for (&d, a) in &self.surds {
            for (&e, b) in &rhs.surds {
                // sqrt(d)*sqrt(e) = g*sqrt((d/g)*(e/g)) for square-free d, e.
                let g = d.gcd(&e);
                let core = (d / g)
                    .checked_mul(e / g)
                    .expect("surd radicand overflows u64");
                let c = a * b * Rational::from_integer(BigInt::from(g));
                if core == 1 {
                    out.rational += c;
                } else {
                    out.add_surd(core, c);
                }
            }
        }
        out
    }
}

impl Default for ExactReal {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<Rational> for ExactReal {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

impl<'a> Add<&'a ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn add(self, rhs: &'a ExactReal) -> ExactReal {
        let mut out = self.clone();
        out.rational += &rhs.rational;
        for (&d, q) in &rhs.surds {
            out.add_surd(d, q.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn sub(self, rhs: &'a ExactReal) -> ExactReal {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ExactReal> for &ExactReal {
    type Output = ExactReal;
    fn mul(self, rhs: &'a ExactReal) -> ExactReal {
        self.mul_ref(rhs)
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal {
            rational: -&self.rational,
            surds: self.surds.iter().map(|(&d, q)| (d, -q)).collect(),
        }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &'a ExactReal) -> ExactReal {
                (&self).$method(rhs)
            }
        }
        impl $tr<ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactReal {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum()
    }
}

/// Decides whether `xs` (together with the constant 1 when `include_one`)
/// admits no nontrivial integer relation.
///
/// Each element is written in the rational basis `{1} ∪ {sqrt(d)}`; integer
/// relations exist iff rational ones do, iff the coordinate matrix has rank
/// below the number of elements.
pub fn is_independent_over_q(xs: &[ExactReal], include_one: bool) -> bool {
    let mut rows: Vec<ExactReal> = Vec::with_capacity(xs.len() + 1);
    if include_one {
        rows.push(ExactReal::one());
    }
    rows.extend(xs.iter().cloned());
    if rows.is_empty() {
        return true;
    }
    let mut columns: Vec<Option<u64>> = vec![None];
    for x in &rows {
        for &d in x.surds.keys() {
            if !columns.contains(&Some(d)) {
                columns.push(Some(d));
            }
        }
    }
    if rows.len() > columns.len() {
        return false;
    }
    let matrix: Vec<Vec<Rational>> = rows
        .iter()
        .map(|x| {
            columns
                .iter()
                .map(|c| match c {
                    None => x.rational.clone(),
                    Some(d) => x.surds.get(d).cloned().unwrap_or_else(Rational::zero),
                })
                .collect()
        })
        .collect();
    rational_rank(matrix) == rows.len()
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let pivot_row = m[rank].clone();
        for row in m.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (entry, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *entry -= &factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Solves the square system `a x = b` exactly; `None` when `a` is singular.
pub fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n) && b.len() == n, "square system expected");
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        let pivot_rhs = b[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot_row[col];
            for (entry, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *entry -= &factor * p;
            }
            b[r] -= &factor * &pivot_rhs;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

pub fn is_square_free(n: u64) -> bool {
    n != 0 && square_free_split(n).0 == 1
}

/// Splits `n` as `outer^2 * core` with `core` square-free.
fn square_free_split(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut outer = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut count = 0;
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
        for _ in 0..count / 2 {
            outer *= p;
        }
        if count % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outer, core * n)
}

fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExactReal {
    /// Canonical literal syntax, e.g. `1/6 + 2/3*sqrt(2) - sqrt(3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        let mut write_term = |f: &mut fmt::Formatter<'_>, q: &Rational, surd: Option<u64>| {
            let negative = q.is_negative();
            let mag = q.abs();
            let sign = match (first, negative) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            first = false;
            match surd {
                None => write!(f, "{sign}{}", fmt_rational(&mag)),
                Some(d) if mag.is_one() => write!(f, "{sign}sqrt({d})"),
                Some(d) => write!(f, "{sign}{}*sqrt({d})", fmt_rational(&mag)),
            }
        };
        if !self.rational.is_zero() {
            write_term(f, &self.rational, None)?;
        }
        for (&d, q) in &self.surds {
            write_term(f, q, Some(d))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid exact-real literal {input:?} at byte {position}: {message}")]
pub struct ParseExactError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(Rational),
    Sqrt,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Result<Self, ParseExactError> {
        let mut tokens = Vec::new();
        let bytes = input.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'(' => tokens.push((start, Token::LParen)),
                b')' => tokens.push((start, Token::RParen)),
                b'+' => tokens.push((start, Token::Plus)),
                b'-' => tokens.push((start, Token::Minus)),
                b'*' => tokens.push((start, Token::Star)),
                b'/' => tokens.push((start, Token::Slash)),
                b'0'..=b'9' | b'.' => {
                    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                        i += 1;
                    }
                    let text = &input[start..i];
                    let value = parse_decimal(text).ok_or_else(|| ParseExactError {
                        input: input.to_string(),
                        position: start,
                        message: format!("malformed number {text:?}"),
                    })?;
                    tokens.push((start, Token::Number(value)));
                    continue;
                }
                _ if input[i..].starts_with("sqrt") => {
                    tokens.push((start, Token::Sqrt));
                    i += 4;
                    continue;
                }
                _ => {
                    return Err(ParseExactError {
                        input: input.to_string(),
                        position: start,
                        message: format!("unexpected character {:?}", c as char),
                    })
                }
            }
            i += 1;
        }
        Ok(Parser {
            input,
            tokens,
            pos: 0,
        })
    }

    fn error(&self, message: impl Into<String>) -> ParseExactError {
        let position = self
            .tokens
            .get(self.pos)
            .map_or(self.input.len(), |(p, _)| *p);
        ParseExactError {
            input: self.input.to_string(),
            position,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseExactError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {want:?}")))
        }
    }

    fn expr(&mut self) -> Result<ExactReal, ParseExactError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExactReal, ParseExactError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc * self.factor()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let divisor = self.factor()?;
                    if !divisor.is_rational() {
                        return Err(self.error("division by an irrational value is not supported"));
                    }
                    if divisor.is_zero() {
                        return Err(self.error("division by zero"));
                    }
                    acc = acc.scale(&divisor.rational_part().recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ExactReal, ParseExactError> {
        match self.next() {
            Some(Token::Minus) => Ok(-self.factor()?),
            Some(Token::Plus) => self.factor(),
            Some(Token::Number(q)) => Ok(ExactReal::from_rational(q)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Sqrt) => {
                self.expect(Token::LParen)?;
                let arg = self.expr()?;
                self.expect(Token::RParen)?;
                if !arg.is_rational() {
                    return Err(self.error("sqrt argument must be rational"));
                }
                ExactReal::sqrt_rational(arg.rational_part())
                    .ok_or_else(|| self.error("sqrt argument must be a nonnegative rational of modest size"))
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.error("expected a number, sqrt(...) or parenthesized expression"))
            }
        }
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if (int_part.is_empty() && frac_part.is_empty()) || frac_part.contains('.') {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Some(Rational::new(numer, denom))
}

impl FromStr for ExactReal {
    type Err = ParseExactError;

    /// Parses literals such as `1/6 + 2/3*sqrt(2) - sqrt(3)`.
    ///
    /// Radicands are normalized: `sqrt(8)` becomes `2*sqrt(2)` and
    /// `sqrt(9)` becomes `3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser::new(s)?;
        if parser.tokens.is_empty() {
            return Err(parser.error("empty literal"));
        }
        let value = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(value)
    }
}
