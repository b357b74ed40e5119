use nalgebra::{Complex, DMatrix};

/// Real polynomial with coefficients in ascending powers of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, w: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * w + c)
    }

    pub fn eval_complex(&self, w: Complex<f64>) -> Complex<f64> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Closed form up to degree 2, companion-matrix eigenvalues above.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let c = &self.coeffs;
        match self.degree() {
            0 => Vec::new(),
            1 => vec![Complex::new(-c[0] / c[1], 0.0)],
            2 => quadratic_roots(c[2], c[1], c[0]),
            n => {
                let lead = c[n];
                let mut m = DMatrix::<f64>::zeros(n, n);
                for i in 1..n {
                    m[(i, i - 1)] = 1.0;
                }
                for i in 0..n {
                    m[(i, n - 1)] = -c[i] / lead;
                }
                m.complex_eigenvalues().iter().copied().collect()
            }
        }
    }
}

/// Roots of `a w² + b w + c`, avoiding cancellation in the real case.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<Complex<f64>> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return vec![Complex::new(0.0, 0.0); 2];
        }
        vec![Complex::new(q / a, 0.0), Complex::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        vec![Complex::new(re, im), Complex::new(re, -im)]
    }
}

/// `det(wI − M)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &DMatrix<f64>) -> Polynomial {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        acc = m * &acc;
        for i in 0..n {
            acc[(i, i)] += coeffs[n - k + 1];
        }
        coeffs[n - k] = -(m * &acc).trace() / k as f64;
    }
    Polynomial::new(coeffs)
}
