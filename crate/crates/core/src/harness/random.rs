//! Seeded random fields for the identity checks.
//!
//! Polynomials are written in normalized coordinates `ξ = (x - c)/w`, where
//! `c` and `w` are the centre and half-width of the sampling box on that
//! axis, so every generated field is of order one on the domain.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::Section;
use crate::error::Result;
use crate::expr::{parse, Chart, Params, ScalarField};
use crate::harness::sampling::Domain;

pub struct RandomFields<'a> {
    chart: &'a Chart,
    domain: &'a Domain,
    rng: ChaCha8Rng,
}

impl<'a> RandomFields<'a> {
    pub fn new(chart: &'a Chart, domain: &'a Domain, seed: u64) -> Self {
        RandomFields { chart, domain, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn coefficient(&mut self, amplitude: f64) -> String {
        // four significant digits keep the printed sources short
        let c = (self.rng.random::<f64>() * 2.0 - 1.0) * amplitude;
        format!("{:.4}", c)
    }

    fn axis(&mut self) -> usize {
        self.rng.random_range(0..self.chart.dim())
    }

    fn normalized(&self, i: usize) -> String {
        let [lo, hi] = self.domain.bounds()[i];
        let (c, w) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let name = &self.chart.coord_names()[i];
        let shifted = if c == 0.0 {
            name.clone()
        } else if c > 0.0 {
            format!("({name} - {c})")
        } else {
            format!("({name} + {})", -c)
        };
        if w == 1.0 {
            shifted
        } else {
            format!("{shifted}/{w}")
        }
    }

    /// Source of a quadratic polynomial with a constant and `terms` monomials.
    pub fn polynomial_source(&mut self, amplitude: f64, terms: usize) -> String {
        let mut out = self.coefficient(amplitude);
        for _ in 0..terms {
            let c = self.coefficient(amplitude);
            let i = self.axis();
            let monomial = if self.rng.random::<bool>() {
                let j = self.axis();
                format!("({})*({})", self.normalized(i), self.normalized(j))
            } else {
                format!("({})", self.normalized(i))
            };
            out = format!("{out} + ({c})*{monomial}");
        }
        out
    }

    pub fn polynomial(&mut self, amplitude: f64, terms: usize) -> Result<ScalarField> {
        let src = self.polynomial_source(amplitude, terms);
        Ok(parse(&src, self.chart, &Params::new())?)
    }

    pub fn section(&mut self, amplitude: f64) -> Result<Section> {
        let comps = (0..self.chart.dim()).map(|_| self.polynomial(amplitude, 3)).collect::<Result<Vec<_>>>()?;
        Section::new(comps)
    }

    /// Mixed trigonometric and polynomial function.
    pub fn test_function(&mut self) -> Result<ScalarField> {
        let (i, j, k) = (self.axis(), self.axis(), self.axis());
        let (a, b, c) = (self.coefficient(1.0), self.coefficient(1.0), self.coefficient(1.0));
        let (xi, xj, xk) = (self.normalized(i), self.normalized(j), self.normalized(k));
        let src = match self.rng.random_range(0..3) {
            0 => format!("({a})*sin({xi})*({xj}) + ({b})*cos({xk}) + ({c})*({xi})^2"),
            1 => format!("({a})*exp(({b})*({xi}))*({xj})^2 + ({c})*sin({xk})"),
            _ => format!("({a})*cos(({xi})*({xj})) + ({b})*({xk})^3 + ({c})"),
        };
        Ok(parse(&src, self.chart, &Params::new())?)
    }

    /// Random expression tree of bounded depth over every construct of the grammar.
    pub fn expression_source(&mut self, depth: usize) -> String {
        if depth == 0 || self.rng.random::<f64>() < 0.2 {
            return if self.rng.random::<bool>() {
                let i = self.axis();
                format!("({})", self.normalized(i))
            } else {
                format!("{:.3}", 0.5 + self.rng.random::<f64>())
            };
        }
        let a = self.expression_source(depth - 1);
        match self.rng.random_range(0..12) {
            0 => format!("({a} + {})", self.expression_source(depth - 1)),
            1 => format!("({a} - {})", self.expression_source(depth - 1)),
            2 => format!("({a} * {})", self.expression_source(depth - 1)),
            3 => format!("({a} / (2 + sin({})))", self.expression_source(depth - 1)),
            4 => format!("sin({a})"),
            5 => format!("cos({a})"),
            6 => format!("exp({a}/4)"),
            7 => format!("log(1 + ({a})^2)"),
            8 => format!("sqrt(2 + cos({a}))"),
            9 => format!("tan({a}/8)"),
            10 => format!("({a})^{}", self.rng.random_range(2..4)),
            _ => format!("-({a})"),
        }
    }

    pub fn expression(&mut self, depth: usize) -> Result<ScalarField> {
        let src = self.expression_source(depth);
        Ok(parse(&src, self.chart, &Params::new())?)
    }
}

/// Independent stream for `(seed, label, index)`.
pub fn derived_seed(seed: u64, label: &str, index: usize) -> u64 {
    // FNV-1a over the label, mixed with the index
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h.rotate_left(17) ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}
