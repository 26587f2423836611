//! Exact integer power series: rational generating-function expansion,
//! residuals of algebraic equations, coefficient-wise solving of quadratic
//! equations, partition counts, stepped Fibonacci numbers, and periodic
//! quasi-polynomials. All arithmetic is big-integer; radicals are never
//! taken, closed forms with square roots are checked through the
//! polynomial equations they satisfy.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

/// Default truncation order: coefficients 0 through N.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("denominator constant term must be nonzero")]
    DenominatorConstantZero,
    #[error("no integer coefficient at order {order}")]
    NonIntegralCoefficient { order: usize },
    #[error("seed does not satisfy the equation's constant term")]
    SeedMismatch,
    #[error("the coefficient recurrence is degenerate (zero linear term)")]
    UnsolvableRecurrence,
    #[error("step count must be at least 1")]
    ZeroStep,
    #[error("every coefficient table needs period at least 1")]
    EmptyPeriod,
    #[error("quasi-polynomial denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse coefficient {0:?}")]
    BadCoefficient(String),
    #[error("quasi-polynomial value at {n} is not an integer")]
    NonIntegralValue { n: usize },
}

/// Integer polynomial as a coefficient list, constant term first, trailing
/// zeros trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| c.into()).collect())
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        f.write_str(&parts.join(", "))
    }
}

impl FromStr for IntPolynomial {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut coeffs = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let c = tok
                .parse::<BigInt>()
                .map_err(|_| SeriesError::BadCoefficient(tok.to_string()))?;
            coeffs.push(c);
        }
        Ok(IntPolynomial::new(coeffs))
    }
}

/// Power series truncated at a fixed order: exactly order + 1 coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerSeries {
    coeffs: Vec<BigInt>,
}

impl IntegerSeries {
    pub fn new(mut coeffs: Vec<BigInt>, order: usize) -> Self {
        coeffs.resize(order + 1, BigInt::zero());
        IntegerSeries { coeffs }
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| c.into()).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for IntegerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Ratio of two integer polynomials with an invertible denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalGF {
    numerator: IntPolynomial,
    denominator: IntPolynomial,
}

impl RationalGF {
    pub fn new(
        numerator: IntPolynomial,
        denominator: IntPolynomial,
    ) -> Result<Self, SeriesError> {
        if denominator.coeff(0).is_zero() {
            return Err(SeriesError::DenominatorConstantZero);
        }
        Ok(RationalGF {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &IntPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntPolynomial {
        &self.denominator
    }
}

fn exact_div(value: BigInt, divisor: &BigInt, order: usize) -> Result<BigInt, SeriesError> {
    if (&value % divisor).is_zero() {
        Ok(value / divisor)
    } else {
        Err(SeriesError::NonIntegralCoefficient { order })
    }
}

/// Expands P/Q to the requested order through the linear recurrence Q
/// induces on the coefficients.
pub fn expand_rational(gf: &RationalGF, order: usize) -> Result<IntegerSeries, SeriesError> {
    let q0 = gf.denominator.coeff(0);
    let qdeg = gf.denominator.degree().unwrap_or(0);
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut v = gf.numerator.coeff(m);
        for j in 1..=qdeg.min(m) {
            v -= gf.denominator.coeff(j) * &coeffs[m - j];
        }
        coeffs.push(exact_div(v, &q0, m)?);
    }
    Ok(IntegerSeries { coeffs })
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Substitutes `s` for y in the bivariate polynomial with y-power
/// coefficients `q2` (index = power of y) and returns the truncated result.
/// An all-zero residual means `s` satisfies the equation to this order;
/// coefficients of `s` beyond its own truncation count as zero.
pub fn algebraic_residual(
    q2: &[IntPolynomial],
    s: &IntegerSeries,
    order: usize,
) -> IntegerSeries {
    let mut acc = vec![BigInt::zero(); order + 1];
    for poly in q2.iter().rev() {
        acc = mul_trunc(&acc, s.coeffs(), order);
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += poly.coeff(i);
        }
    }
    IntegerSeries { coeffs: acc }
}

/// Solves a·S² + b·S + c = 0 for the unique series with the given constant
/// term, extracting one coefficient per order. The linear factor
/// 2·a(0)·seed + b(0) must be invertible and every extracted coefficient
/// must be an integer; anything else signals the wrong branch or equation.
pub fn solve_quadratic_series(
    a: &IntPolynomial,
    b: &IntPolynomial,
    c: &IntPolynomial,
    seed: i64,
    order: usize,
) -> Result<IntegerSeries, SeriesError> {
    let s0 = BigInt::from(seed);
    let constant = a.coeff(0) * &s0 * &s0 + b.coeff(0) * &s0 + c.coeff(0);
    if !constant.is_zero() {
        return Err(SeriesError::SeedMismatch);
    }
    let lambda = BigInt::from(2) * a.coeff(0) * &s0 + b.coeff(0);
    if lambda.is_zero() {
        return Err(SeriesError::UnsolvableRecurrence);
    }
    let mut s = vec![s0];
    for m in 1..=order {
        s.push(BigInt::zero());
        let mut r = c.coeff(m);
        for i in 0..=m {
            r += b.coeff(i) * &s[m - i];
        }
        for i in 0..=m {
            let ai = a.coeff(i);
            if ai.is_zero() {
                continue;
            }
            for j in 0..=(m - i) {
                r += &ai * &s[j] * &s[m - i - j];
            }
        }
        s[m] = exact_div(-r, &lambda, m)?;
    }
    Ok(IntegerSeries { coeffs: s })
}

/// Partition numbers p(0..=order), by the product over part sizes; the
/// pentagonal-number recurrence recomputes every value as a cross-check.
pub fn partition_numbers(order: usize) -> IntegerSeries {
    let by_product = partition_at_most(order, order.max(1));
    let mut by_recurrence: Vec<BigInt> = vec![BigInt::from(1)];
    for n in 1..=order {
        let mut v = BigInt::zero();
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 as usize > n {
                break;
            }
            let mut term = by_recurrence[n - g1 as usize].clone();
            if g2 as usize <= n {
                term += &by_recurrence[n - g2 as usize];
            }
            if k % 2 == 0 {
                v -= term;
            } else {
                v += term;
            }
            k += 1;
        }
        by_recurrence.push(v);
    }
    assert_eq!(
        by_product.coeffs(),
        &by_recurrence[..],
        "partition product and pentagonal recurrence disagree"
    );
    by_product
}

/// Partitions of 0..=order into at most `parts` parts.
pub fn partition_at_most(order: usize, parts: usize) -> IntegerSeries {
    let mut table = vec![BigInt::zero(); order + 1];
    table[0] = BigInt::from(1);
    for m in 1..=parts.min(order.max(1)) {
        for i in m..=order {
            let prev = table[i - m].clone();
            table[i] += prev;
        }
    }
    IntegerSeries { coeffs: table }
}

/// Stepped Fibonacci numbers: F(0) = 1, F(n) = F(n-1) + ... + F(n-step),
/// terms below zero contributing nothing.
pub fn fib_generalized(n: usize, step: usize) -> Result<BigInt, SeriesError> {
    if step == 0 {
        return Err(SeriesError::ZeroStep);
    }
    let mut values: Vec<BigInt> = vec![BigInt::from(1)];
    for m in 1..=n {
        let lo = m.saturating_sub(step);
        let v = values[lo..m].iter().sum();
        values.push(v);
    }
    Ok(values.pop().expect("at least F(0)"))
}

/// Periodic quasi-polynomial: value(n) = sum over powers j of
/// table_j[n mod period_j] * n^j, divided exactly by a common denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuasiPolynomial {
    tables: Vec<Vec<BigInt>>,
    denominator: BigInt,
}

impl QuasiPolynomial {
    pub fn new(tables: Vec<Vec<BigInt>>, denominator: BigInt) -> Result<Self, SeriesError> {
        if tables.iter().any(Vec::is_empty) {
            return Err(SeriesError::EmptyPeriod);
        }
        if denominator.is_zero() {
            return Err(SeriesError::ZeroDenominator);
        }
        Ok(QuasiPolynomial {
            tables,
            denominator,
        })
    }

    pub fn from_i64(tables: &[&[i64]], denominator: i64) -> Result<Self, SeriesError> {
        Self::new(
            tables
                .iter()
                .map(|t| t.iter().map(|&c| c.into()).collect())
                .collect(),
            denominator.into(),
        )
    }

    pub fn degree(&self) -> Option<usize> {
        self.tables.len().checked_sub(1)
    }
}

/// Evaluates a quasi-polynomial at n.
pub fn quasi_eval(qp: &QuasiPolynomial, n: usize) -> Result<BigInt, SeriesError> {
    let big_n = BigInt::from(n);
    let mut power = BigInt::from(1);
    let mut total = BigInt::zero();
    for table in &qp.tables {
        total += &table[n % table.len()] * &power;
        power *= &big_n;
    }
    if (&total % &qp.denominator).is_zero() {
        Ok(total / &qp.denominator)
    } else {
        Err(SeriesError::NonIntegralValue { n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(num: &[i64], den: &[i64]) -> RationalGF {
        RationalGF::new(IntPolynomial::from_i64(num), IntPolynomial::from_i64(den)).unwrap()
    }

    fn ints(s: &IntegerSeries) -> Vec<i64> {
        s.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn rational_expansion_examples() {
        let halves = expand_rational(&gf(&[1], &[1, -1, -1, 1]), 9).unwrap();
        assert_eq!(ints(&halves), [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]);
        let doubling = expand_rational(&gf(&[1, -1, -2, 1], &[1, -2, -2, 4]), 9).unwrap();
        assert_eq!(ints(&doubling), [1, 1, 2, 3, 6, 10, 20, 36, 72, 136]);
        let ones = expand_rational(&gf(&[1], &[1, -1]), 5).unwrap();
        assert_eq!(ints(&ones), [1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn rational_expansion_round_trips_through_the_denominator() {
        let num = IntPolynomial::from_i64(&[2, 0, -3, 1]);
        let den = IntPolynomial::from_i64(&[1, -1, -1]);
        let s = expand_rational(&RationalGF::new(num.clone(), den.clone()).unwrap(), 12).unwrap();
        let neg_num = IntPolynomial::new(num.coeffs().iter().map(|c| -c).collect());
        assert!(algebraic_residual(&[neg_num, den], &s, 12).is_zero());
    }

    #[test]
    fn rational_expansion_errors() {
        assert_eq!(
            RationalGF::new(IntPolynomial::from_i64(&[1]), IntPolynomial::from_i64(&[0, 1])),
            Err(SeriesError::DenominatorConstantZero)
        );
        assert_eq!(
            expand_rational(&gf(&[1], &[2, -1]), 3),
            Err(SeriesError::NonIntegralCoefficient { order: 0 })
        );
    }

    #[test]
    fn residual_vanishes_on_known_solutions() {
        let s_reflexive = IntegerSeries::from_i64(&[0, 1, 4, 28, 244, 2380], 5);
        let eq_reflexive = [
            IntPolynomial::from_i64(&[0, 1]),
            IntPolynomial::from_i64(&[-1, 1]),
            IntPolynomial::from_i64(&[3]),
        ];
        assert!(algebraic_residual(&eq_reflexive, &s_reflexive, 5).is_zero());

        let s_mixed = IntegerSeries::from_i64(&[0, 2, 16, 224, 3904], 4);
        let eq_mixed = [
            IntPolynomial::from_i64(&[0, 2]),
            IntPolynomial::from_i64(&[-1, 2]),
            IntPolynomial::from_i64(&[3]),
        ];
        assert!(algebraic_residual(&eq_mixed, &s_mixed, 4).is_zero());

        let y_minus_x = [IntPolynomial::from_i64(&[0, -1]), IntPolynomial::from_i64(&[1])];
        assert!(algebraic_residual(&y_minus_x, &IntegerSeries::from_i64(&[0, 1], 4), 4).is_zero());
        let off = algebraic_residual(&y_minus_x, &IntegerSeries::from_i64(&[0, 1, 1], 4), 4);
        assert_eq!(ints(&off), [0, 0, 1, 0, 0]);
    }

    #[test]
    fn quadratic_solver_reproduces_the_known_series() {
        let a = IntPolynomial::from_i64(&[3]);
        let b = IntPolynomial::from_i64(&[-1, 1]);
        let c = IntPolynomial::from_i64(&[0, 1]);
        let s = solve_quadratic_series(&a, &b, &c, 0, 5).unwrap();
        assert_eq!(ints(&s), [0, 1, 4, 28, 244, 2380]);
        assert!(algebraic_residual(&[c, b, a], &s, 5).is_zero());

        let schroeder = solve_quadratic_series(
            &IntPolynomial::from_i64(&[0, 1]),
            &IntPolynomial::from_i64(&[-1, 1]),
            &IntPolynomial::from_i64(&[1]),
            1,
            6,
        )
        .unwrap();
        assert_eq!(ints(&schroeder), [1, 2, 6, 22, 90, 394, 1806]);
    }

    #[test]
    fn quadratic_family_members_agree_where_they_should() {
        let mixed = solve_quadratic_series(
            &IntPolynomial::from_i64(&[3]),
            &IntPolynomial::from_i64(&[-1, 2]),
            &IntPolynomial::from_i64(&[0, 2]),
            0,
            4,
        )
        .unwrap();
        assert_eq!(ints(&mixed), [0, 2, 16, 224, 3904]);
        let k = 1u32;
        let general = solve_quadratic_series(
            &IntPolynomial::from_i64(&[i64::from(4u32.pow(k)) - 1]),
            &IntPolynomial::from_i64(&[-1, i64::from(2u32.pow(k))]),
            &IntPolynomial::from_i64(&[0, i64::from(2u32.pow(k))]),
            0,
            4,
        )
        .unwrap();
        assert_eq!(general, mixed);
    }

    #[test]
    fn quadratic_solver_errors() {
        let a = IntPolynomial::from_i64(&[3]);
        let b = IntPolynomial::from_i64(&[-1, 1]);
        let c = IntPolynomial::from_i64(&[0, 1]);
        assert_eq!(
            solve_quadratic_series(&a, &b, &c, 1, 4),
            Err(SeriesError::SeedMismatch)
        );
        assert_eq!(
            solve_quadratic_series(
                &IntPolynomial::from_i64(&[1]),
                &IntPolynomial::from_i64(&[0, 1]),
                &IntPolynomial::from_i64(&[0, 0, -1]),
                0,
                4
            ),
            Err(SeriesError::UnsolvableRecurrence)
        );
    }

    #[test]
    fn partition_values() {
        let p = partition_numbers(10);
        assert_eq!(ints(&p), [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        let pairs = partition_at_most(9, 2);
        assert_eq!(ints(&pairs), [1, 1, 2, 2, 3, 3, 4, 4, 5, 5]);
        let triples = partition_at_most(8, 3);
        let product = expand_rational(&gf(&[1], &[1, -1, -1, 0, 1, 1, -1]), 8).unwrap();
        assert_eq!(triples, product);
    }

    #[test]
    fn stepped_fibonacci() {
        for n in 0..=10 {
            assert_eq!(fib_generalized(n, 1).unwrap(), BigInt::from(1));
        }
        for n in 1..=8usize {
            assert_eq!(
                fib_generalized(n, n).unwrap(),
                BigInt::from(1u64 << (n - 1))
            );
        }
        let fibs: Vec<BigInt> = (0..=7).map(|n| fib_generalized(n, 2).unwrap()).collect();
        let expected: Vec<BigInt> = [1, 1, 2, 3, 5, 8, 13, 21].map(BigInt::from).to_vec();
        assert_eq!(fibs, expected);
        assert_eq!(fib_generalized(3, 0), Err(SeriesError::ZeroStep));
    }

    #[test]
    fn quasi_polynomial_evaluation() {
        let qp = QuasiPolynomial::from_i64(&[&[8, 3], &[6, 4], &[1, 1]], 8).unwrap();
        assert_eq!(qp.degree(), Some(2));
        let values: Vec<BigInt> = (3..=8).map(|n| quasi_eval(&qp, n).unwrap()).collect();
        let expected: Vec<BigInt> = [3, 6, 6, 10, 10, 15].map(BigInt::from).to_vec();
        assert_eq!(values, expected);
        let bad = QuasiPolynomial::from_i64(&[&[1]], 8).unwrap();
        assert_eq!(quasi_eval(&bad, 3), Err(SeriesError::NonIntegralValue { n: 3 }));
        assert_eq!(
            QuasiPolynomial::from_i64(&[&[]], 1),
            Err(SeriesError::EmptyPeriod)
        );
        assert_eq!(
            QuasiPolynomial::from_i64(&[&[1]], 0),
            Err(SeriesError::ZeroDenominator)
        );
    }

    #[test]
    fn notation_round_trips() {
        let p: IntPolynomial = "1, -1, -1, 1".parse().unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[1, -1, -1, 1]));
        assert_eq!(p.to_string(), "1, -1, -1, 1");
        assert!(matches!(
            "1, x".parse::<IntPolynomial>(),
            Err(SeriesError::BadCoefficient(_))
        ));
        let s = IntegerSeries::from_i64(&[1, 1, 2, 2], 3);
        assert_eq!(s.to_string(), "1, 1, 2, 2");
        assert_eq!(IntPolynomial::default().to_string(), "0");
    }
}
