use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of `rule` mapped onto every panel.
pub fn composite(panels: &[(f64, f64)], rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels.len() * rule.len());
    for &(a, b) in panels {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        out.extend(rule.iter().map(|&(x, w)| (mid + half * x, half * w)));
    }
    out
}

/// Splits `[-half_width, half_width]` into panels that shrink geometrically,
/// starting at `first`, towards each point of `singular`.
pub fn graded_panels(singular: &[f64], half_width: f64, first: f64, max_width: f64) -> Vec<(f64, f64)> {
    let mut marks: Vec<f64> = singular.iter().copied().filter(|p| p.abs() < half_width).collect();
    marks.sort_by(f64::total_cmp);
    marks.dedup_by(|a, b| (*a - *b).abs() <= first);

    let mut edges = vec![(-half_width, false)];
    edges.extend(marks.iter().map(|&p| (p, true)));
    edges.push((half_width, false));

    let mut panels = Vec::new();
    for pair in edges.windows(2) {
        let ((a, sa), (b, sb)) = (pair[0], pair[1]);
        match (sa, sb) {
            (true, true) => {
                let mid = 0.5 * (a + b);
                graded_towards_left(a, mid, first, max_width, &mut panels);
                let start = panels.len();
                graded_towards_left(-b, -mid, first, max_width, &mut panels);
                mirror_tail(&mut panels, start);
            }
            (true, false) => graded_towards_left(a, b, first, max_width, &mut panels),
            (false, true) => {
                let start = panels.len();
                graded_towards_left(-b, -a, first, max_width, &mut panels);
                mirror_tail(&mut panels, start);
            }
            (false, false) => uniform(a, b, max_width, &mut panels),
        }
    }
    panels
}

fn mirror_tail(panels: &mut [(f64, f64)], start: usize) {
    let tail = &mut panels[start..];
    tail.reverse();
    for p in tail.iter_mut() {
        *p = (-p.1, -p.0);
    }
}

fn graded_towards_left(a: f64, b: f64, first: f64, max_width: f64, out: &mut Vec<(f64, f64)>) {
    let mut left = a;
    let mut width = first;
    while left + 2.0 * width < b && width < max_width {
        out.push((left, left + width));
        left += width;
        width *= 2.0;
    }
    uniform(left, b, max_width, out);
}

fn uniform(a: f64, b: f64, max_width: f64, out: &mut Vec<(f64, f64)>) {
    let count = ((b - a) / max_width).ceil().max(1.0) as usize;
    let step = (b - a) / count as f64;
    for k in 0..count {
        let lo = a + step * k as f64;
        let hi = if k + 1 == count { b } else { a + step * (k + 1) as f64 };
        out.push((lo, hi));
    }
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 16 {
        values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}
