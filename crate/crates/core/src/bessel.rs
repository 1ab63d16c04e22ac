//! Bessel functions `J_ν` for the integer and half-integer orders that
//! appear in sphere Fourier transforms (`ν = (n-2)/2`, `n ≤ 8`).

use std::f64::consts::PI;

/// Switch point between the small-argument and asymptotic branches.
const ASYMPTOTIC_FROM: f64 = 25.0;

/// `J_ν(x)` for `x ≥ 0` and `2ν` a non-negative integer.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_j needs x >= 0");
    let two_nu = (2.0 * nu).round();
    assert!(
        (2.0 * nu - two_nu).abs() < 1e-12 && two_nu >= 0.0,
        "order must be an integer or half-integer"
    );
    let half_integer = two_nu as i64 % 2 == 1;
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if half_integer {
        if x < 8.0 {
            power_series(nu, x)
        } else {
            // Hankel series terminates for half-integer order: exact.
            hankel(nu, x)
        }
    } else if x < ASYMPTOTIC_FROM {
        bessel_integral(two_nu as i64 / 2, x)
    } else {
        hankel(nu, x)
    }
}

/// Ascending series; used only where terms stay moderate.
fn power_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let q = h * h;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Bessel's integral `J_m(x) = (1/π) ∫_0^π cos(mθ − x sin θ) dθ`; the
/// integrand is periodic and analytic, so the trapezoid rule converges
/// geometrically once the node count exceeds `x + m`.
fn bessel_integral(m: i64, x: f64) -> f64 {
    let nodes = (x.ceil() as usize + m.unsigned_abs() as usize + 48).max(64);
    let h = PI / nodes as f64;
    let f = |theta: f64| (m as f64 * theta - x * theta.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for i in 1..nodes {
        sum += f(i as f64 * h);
    }
    sum * h / PI
}

/// Hankel asymptotic expansion `sqrt(2/(πx)) (P cos χ − Q sin χ)`.
fn hankel(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The amplitudes `P(ν, x)`, `Q(ν, x)` of the Hankel expansion, summed up to
/// the smallest term. Exact (finite) for half-integer `ν`.
pub fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k(ν) / x^k, with a_k = prod_{j=1..k} (μ − (2j−1)²) / (k! 8^k)
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..200 {
        if k > 0 {
            let j = (2 * k - 1) as f64;
            term *= (mu - j * j) / (k as f64 * 8.0 * x);
        }
        let a = term.abs();
        if a == 0.0 {
            break;
        }
        if a > last {
            // asymptotic series starts diverging
            break;
        }
        last = a;
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if a < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// Gamma function on positive half-integers and integers (enough for the
/// orders used here), via the Lanczos approximation otherwise.
pub fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && (twice - twice.round()).abs() < 1e-14 && x < 170.0 {
        let mut value = if (x - x.round()).abs() < 1e-14 { 1.0 } else { PI.sqrt() };
        let mut y = if (x - x.round()).abs() < 1e-14 { 1.0 } else { 0.5 };
        while y < x - 1e-12 {
            value *= y;
            y += 1.0;
        }
        return value;
    }
    lanczos_gamma(x)
}

fn lanczos_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}
