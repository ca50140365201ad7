//! Trigonometric Wronskian pairs on the cylinder, returned as homogeneous
//! polynomials p(X, Y), q(X, Y) solving qΔp − 2∇q·∇p + pΔq = 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::polynomials::determinant_expansion;
use crate::scalar::{rat, rat_to_f64, ComplexField, Cx, Field, QSqrt3, Rational, Ring};

/// Σⱼ cⱼ X^{d−j} Yʲ.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogeneous<T> {
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Field> Homogeneous<T> {
    pub fn new(degree: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != degree + 1 {
            return Err(Error::Validation(format!(
                "homogeneous polynomial of degree {degree} needs {} coefficients, got {}",
                degree + 1,
                coeffs.len()
            )));
        }
        Ok(Homogeneous { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Homogeneous {
            degree,
            coeffs: vec![T::zero(); degree + 1],
        }
    }

    /// X + cY
    fn linear(c: T) -> Self {
        Homogeneous {
            degree: 1,
            coeffs: vec![T::one(), c],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Sum; a zero summand of any degree is absorbed.
    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, o.degree, "adding homogeneous polynomials of different degree");
        Homogeneous {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Homogeneous {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out: Homogeneous<T> = Homogeneous::zero(self.degree + o.degree);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Homogeneous::new(0, vec![T::one()]).unwrap(), |acc, _| acc.mul(self))
    }

    pub fn dx(&self) -> Self {
        if self.degree == 0 {
            return Homogeneous::zero(0);
        }
        let d = self.degree;
        Homogeneous {
            degree: d - 1,
            coeffs: (0..d).map(|j| self.coeffs[j].mul(&T::from_i64((d - j) as i64))).collect(),
        }
    }

    pub fn dy(&self) -> Self {
        if self.degree == 0 {
            return Homogeneous::zero(0);
        }
        Homogeneous {
            degree: self.degree - 1,
            coeffs: (1..=self.degree).map(|j| self.coeffs[j].mul(&T::from_i64(j as i64))).collect(),
        }
    }

    pub fn laplacian(&self) -> Self {
        self.dx().dx().add(&self.dy().dy())
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let d = self.degree;
        self.coeffs.iter().enumerate().fold(T::zero(), |acc, (j, c)| {
            let mut term = c.clone();
            for _ in 0..d - j {
                term = term.mul(x);
            }
            for _ in 0..j {
                term = term.mul(y);
            }
            acc.add(&term)
        })
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Homogeneous<U> {
        Homogeneous {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// qΔp − 2∇q·∇p + pΔq
pub fn laplace_residual<T: Field>(p: &Homogeneous<T>, q: &Homogeneous<T>) -> Homogeneous<T> {
    let grad = p.dx().mul(&q.dx()).add(&p.dy().mul(&q.dy()));
    q.mul(&p.laplacian())
        .add(&grad.scale(&T::from_i64(-2)))
        .add(&p.mul(&q.laplacian()))
}

/// Homogeneous polynomial with exact a + b√3 or real float coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum PlanePolynomial {
    Exact(Homogeneous<QSqrt3>),
    Float(Homogeneous<Complex64>),
}

impl PlanePolynomial {
    pub fn degree(&self) -> usize {
        match self {
            PlanePolynomial::Exact(h) => h.degree(),
            PlanePolynomial::Float(h) => h.degree(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PlanePolynomial::Exact(_))
    }

    pub fn to_float(&self) -> Homogeneous<Complex64> {
        match self {
            PlanePolynomial::Exact(h) => h.map(|c| c.to_c64()),
            PlanePolynomial::Float(h) => h.clone(),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.to_float().eval(&Complex64::new(x, 0.0), &Complex64::new(y, 0.0)).re
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PlaneCoeff {
    Exact(String, String),
    Float(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneWire {
    exact: bool,
    degree: usize,
    coeffs: Vec<PlaneCoeff>,
}

impl Serialize for PlanePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            PlanePolynomial::Exact(h) => PlaneWire {
                exact: true,
                degree: h.degree,
                coeffs: h
                    .coeffs
                    .iter()
                    .map(|c| PlaneCoeff::Exact(c.a.to_string(), c.b.to_string()))
                    .collect(),
            },
            PlanePolynomial::Float(h) => PlaneWire {
                exact: false,
                degree: h.degree,
                coeffs: h.coeffs.iter().map(|c| PlaneCoeff::Float(c.re)).collect(),
            },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlanePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = PlaneWire::deserialize(d)?;
        let bad = |e: Error| D::Error::custom(e.to_string());
        if wire.exact {
            let coeffs = wire
                .coeffs
                .into_iter()
                .map(|c| match c {
                    PlaneCoeff::Exact(a, b) => {
                        let a: Rational = a.parse().map_err(|_| D::Error::custom(format!("bad rational {a:?}")))?;
                        let b: Rational = b.parse().map_err(|_| D::Error::custom(format!("bad rational {b:?}")))?;
                        Ok(QSqrt3::new(a, b))
                    }
                    PlaneCoeff::Float(_) => Err(D::Error::custom("exact polynomial with a float coefficient")),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Homogeneous::new(wire.degree, coeffs).map(PlanePolynomial::Exact).map_err(bad)
        } else {
            let coeffs = wire
                .coeffs
                .into_iter()
                .map(|c| match c {
                    PlaneCoeff::Float(x) => Ok(Complex64::new(x, 0.0)),
                    PlaneCoeff::Exact(..) => Err(D::Error::custom("float polynomial with an exact coefficient")),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Homogeneous::new(wire.degree, coeffs).map(PlanePolynomial::Float).map_err(bad)
        }
    }
}

/// Σₖ cₖ e^{i(min+k)φ}
#[derive(Clone, Debug, PartialEq)]
struct Trig<T> {
    min: i64,
    coeffs: Vec<T>,
}

impl<T: ComplexField> Trig<T> {
    fn normalized(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.min += lead as i64;
        if self.coeffs.is_empty() {
            self.min = 0;
        }
        self
    }

    fn coeff(&self, k: i64) -> T {
        let idx = k - self.min;
        if idx < 0 {
            return T::zero();
        }
        self.coeffs.get(idx as usize).cloned().unwrap_or_else(T::zero)
    }

    fn max(&self) -> i64 {
        self.min + self.coeffs.len() as i64 - 1
    }

    /// d/dφ
    fn derivative(&self) -> Self {
        Trig {
            min: self.min,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.mul(&T::i()).mul(&T::from_i64(self.min + k as i64)))
                .collect(),
        }
        .normalized()
    }

    /// sin(aφ + t) = (e^{it} e^{iaφ} − e^{−it} e^{−iaφ}) / 2i given e^{it}.
    fn sine(a: i64, phase: &T) -> Self {
        let two_i = T::i().mul(&T::from_i64(2));
        let plus = phase.div(&two_i);
        let minus = phase.conj().div(&two_i).neg();
        let mut out = Trig {
            min: -a,
            coeffs: vec![T::zero(); 2 * a as usize + 1],
        };
        let last = out.coeffs.len() - 1;
        out.coeffs[last] = out.coeffs[last].add(&plus);
        out.coeffs[0] = out.coeffs[0].add(&minus);
        out.normalized()
    }
}

impl<T: ComplexField> Ring for Trig<T> {
    fn zero() -> Self {
        Trig { min: 0, coeffs: Vec::new() }
    }
    fn one() -> Self {
        Trig {
            min: 0,
            coeffs: vec![T::one()],
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() {
            return o.clone();
        }
        if o.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.min.min(o.min);
        let hi = self.max().max(o.max());
        Trig {
            min: lo,
            coeffs: (lo..=hi).map(|k| self.coeff(k).add(&o.coeff(k))).collect(),
        }
        .normalized()
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Trig::zero();
        }
        let mut coeffs = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Trig {
            min: self.min + o.min,
            coeffs,
        }
        .normalized()
    }
    fn neg(&self) -> Self {
        Trig {
            min: self.min,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }
}

/// W_φ[sin(a₁φ + t₁), …] as a Fourier series.
fn trig_wronskian<T: ComplexField>(freqs: &[usize], phases: &[T]) -> Trig<T> {
    let k = freqs.len();
    let matrix: Vec<Vec<Trig<T>>> = freqs
        .iter()
        .zip(phases)
        .map(|(&a, ph)| {
            let mut row = Vec::with_capacity(k);
            let mut f = Trig::sine(a as i64, ph);
            for _ in 0..k {
                let next = f.derivative();
                row.push(f);
                f = next;
            }
            row
        })
        .collect();
    if k == 0 {
        return Trig::one();
    }
    determinant_expansion(&matrix)
}

/// r^N·T(φ) as a homogeneous polynomial of degree N, using
/// r^N e^{±ikφ} = (X² + Y²)^{(N−k)/2}(X ± iY)^k.
fn to_cartesian<T: ComplexField>(t: &Trig<T>, n: usize) -> Result<Homogeneous<T>> {
    let r2 = Homogeneous::new(2, vec![T::one(), T::zero(), T::one()])?;
    let mut out = Homogeneous::zero(n);
    for (idx, c) in t.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let freq = t.min + idx as i64;
        let k = freq.unsigned_abs() as usize;
        if k > n || (n - k) % 2 != 0 {
            return Err(Error::Validation(format!(
                "frequency {freq} does not fit a homogeneous polynomial of degree {n}"
            )));
        }
        let unit = if freq >= 0 { T::i() } else { T::i().neg() };
        let term = r2.pow((n - k) / 2).mul(&Homogeneous::linear(unit).pow(k)).scale(c);
        out = out.add(&term);
    }
    Ok(out)
}

/// (cos t, sin t) for t = jπ/6.
fn exact_phase(j: i64) -> Cx<QSqrt3> {
    let half = || QSqrt3::new(rat(1, 2), <Rational as Zero>::zero());
    let half_root = || QSqrt3::new(<Rational as Zero>::zero(), rat(1, 2));
    let one = QSqrt3::one;
    let zero = QSqrt3::zero;
    let base = match j.rem_euclid(6) {
        0 => Cx::new(one(), zero()),
        1 => Cx::new(half_root(), half()),
        2 => Cx::new(half(), half_root()),
        3 => Cx::new(zero(), one()),
        4 => Cx::new(half().neg(), half_root()),
        _ => Cx::new(half_root().neg(), half()),
    };
    if j.rem_euclid(12) >= 6 {
        base.neg()
    } else {
        base
    }
}

/// j with t = jπ/6, if any.
pub fn pi_sixths(t: f64) -> Option<i64> {
    let j = (t / (PI / 6.0)).round();
    ((t - j * PI / 6.0).abs() <= 1e-12 * t.abs().max(1.0)).then_some(j as i64)
}

fn real_part_exact(h: Homogeneous<Cx<QSqrt3>>) -> Result<Homogeneous<QSqrt3>> {
    if h.coeffs.iter().any(|c| !c.im.is_zero()) {
        return Err(Error::Validation("cylinder Wronskian has a nonzero imaginary part".into()));
    }
    Ok(h.map(|c| c.re.clone()))
}

fn real_part_float(h: Homogeneous<Complex64>) -> Result<Homogeneous<Complex64>> {
    let scale = h.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if h.coeffs.iter().any(|c| c.im.abs() > 1e-9 * scale.max(1e-300)) {
        return Err(Error::Validation("cylinder Wronskian has a nonzero imaginary part".into()));
    }
    Ok(h.map(|c| Complex64::new(c.re, 0.0)))
}

/// (p, q) = (r^n W[ψ₁…ψ_{k+1}], r^m W[ψ₁…ψ_k]) with ψⱼ = sin(iⱼφ + tⱼ),
/// exact when every tⱼ is a multiple of π/6.
pub fn cylinder_polynomials(indices: &[usize], ts: &[f64]) -> Result<(PlanePolynomial, PlanePolynomial)> {
    if indices.is_empty() || indices.len() != ts.len() {
        return Err(Error::Validation(format!(
            "cylinder pair needs k+1 >= 1 indices and as many phases (got {} and {})",
            indices.len(),
            ts.len()
        )));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("indices must be strictly increasing".into()));
    }
    let k = indices.len() - 1;
    let n: usize = indices.iter().sum();
    let m: usize = indices[..k].iter().sum();
    let sixths: Option<Vec<i64>> = ts.iter().map(|&t| pi_sixths(t)).collect();
    let degenerate = |w: bool| if w { Err(Error::DegenerateWronskian) } else { Ok(()) };
    match sixths {
        Some(js) => {
            let phases: Vec<Cx<QSqrt3>> = js.iter().map(|&j| exact_phase(j)).collect();
            let wp = trig_wronskian(indices, &phases);
            let wq = trig_wronskian(&indices[..k], &phases[..k]);
            degenerate(wp.is_zero() || wq.is_zero())?;
            let p = real_part_exact(to_cartesian(&wp, n)?)?;
            let q = real_part_exact(to_cartesian(&wq, m)?)?;
            Ok((PlanePolynomial::Exact(p), PlanePolynomial::Exact(q)))
        }
        None => {
            let phases: Vec<Complex64> = ts.iter().map(|&t| Complex64::new(t.cos(), t.sin())).collect();
            let wp = trig_wronskian(indices, &phases);
            let wq = trig_wronskian(&indices[..k], &phases[..k]);
            let tiny = |t: &Trig<Complex64>| t.coeffs.iter().all(|c| c.norm() < 1e-12);
            degenerate(tiny(&wp) || tiny(&wq))?;
            let p = real_part_float(to_cartesian(&wp, n)?)?;
            let q = real_part_float(to_cartesian(&wq, m)?)?;
            Ok((PlanePolynomial::Float(p), PlanePolynomial::Float(q)))
        }
    }
}

/// Largest |coefficient|, for exact polynomials via their float value.
pub(crate) fn plane_max_abs(h: &PlanePolynomial) -> f64 {
    h.to_float().coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub(crate) fn qsqrt3_string(c: &QSqrt3) -> String {
    format!("{} + {}*sqrt(3) (~{:e})", c.a, c.b, rat_to_f64(&c.a) + rat_to_f64(&c.b) * 3f64.sqrt())
}
