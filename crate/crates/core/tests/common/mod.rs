#![allow(dead_code)]

use num_complex::Complex64;
use qchain::exec::rng_from_seed;
use qchain::lindblad::{build_hamiltonian, build_liouvillian, initial_state, propagate, ChainGeometry};
use qchain::policy::{log_softmax, Mlp, MlpSpec, Sample};
use qchain::PhysicalConfig;
use rand::Rng;

pub type C = Complex64;

/// Dense complex matrix, row-major, independent of the library's types.
#[derive(Clone, Debug)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<C>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            a: vec![C::new(0.0, 0.0); n * n],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> C {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.a[i * self.n + j] = v;
    }

    fn mul(&self, o: &Mat) -> Mat {
        let n = self.n;
        let mut r = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.at(i, k);
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    r.a[i * n + j] += x * o.at(k, j);
                }
            }
        }
        r
    }

    fn axpy(&self, s: f64, o: &Mat) -> Mat {
        Mat {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y * s).collect(),
        }
    }
}

/// Site energies on the diagonal, `J / |x_i − x_j|³` off it, plus an
/// uncoupled sink level when `sink` is set.
pub fn oracle_hamiltonian(x: &[f64], delta_e: f64, j: f64, sink: bool) -> Mat {
    let n = x.len();
    let mut h = Mat::zeros(n + sink as usize);
    for a in 0..n {
        h.set(a, a, C::new(delta_e, 0.0));
        for b in 0..n {
            if a != b {
                h.set(a, b, C::new(j / (x[a] - x[b]).abs().powi(3), 0.0));
            }
        }
    }
    h
}

/// `dρ/dt = −i[H, ρ] + κ (|S⟩⟨B| ρ |B⟩⟨S| − ½{|B⟩⟨B|, ρ})` with B the last
/// chain site and S the extra level.
pub fn lindblad_rhs(h: &Mat, kappa: f64, sites: usize, sink: bool, rho: &Mat) -> Mat {
    let n = rho.n;
    let mi = C::new(0.0, -1.0);
    let hr = h.mul(rho);
    let rh = rho.mul(h);
    let mut d = Mat::zeros(n);
    for k in 0..n * n {
        d.a[k] = mi * (hr.a[k] - rh.a[k]);
    }
    if sink && kappa > 0.0 {
        let b = sites - 1;
        let s = sites;
        d.a[s * n + s] += rho.at(b, b) * kappa;
        for k in 0..n {
            // ½{|B⟩⟨B|, ρ}: row B and column B, each weighted ½.
            d.a[b * n + k] -= rho.at(b, k) * (0.5 * kappa);
            d.a[k * n + b] -= rho.at(k, b) * (0.5 * kappa);
        }
    }
    d
}

/// Dormand–Prince 5(4) with adaptive steps, integrating to exactly `t_end`.
pub fn dopri5(f: impl Fn(&Mat) -> Mat, y0: &Mat, t_end: f64, rtol: f64, atol: f64) -> Mat {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut t = 0.0;
    let mut y = y0.clone();
    let mut h = 1e-3;
    let mut k1 = f(&y);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let mut ks = vec![k1.clone()];
        for (s, row) in A.iter().enumerate() {
            let mut yi = y.clone();
            for (w, k) in row.iter().zip(&ks).take(s + 1) {
                if *w != 0.0 {
                    yi = yi.axpy(h * w, k);
                }
            }
            ks.push(f(&yi));
            if s == 5 {
                // FSAL: stage 7 is evaluated at the proposed solution.
                let mut err = 0.0f64;
                for idx in 0..y.a.len() {
                    let mut e = C::new(0.0, 0.0);
                    for (c, k) in E.iter().zip(&ks) {
                        e += k.a[idx] * *c;
                    }
                    let sc = atol + rtol * y.a[idx].norm().max(yi.a[idx].norm());
                    err = err.max((e * h).norm() / sc);
                }
                if err <= 1.0 {
                    t += h;
                    y = yi;
                    k1 = ks.pop().unwrap();
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            }
        }
    }
    y
}

/// Random chain on [0, 1]: `n` sites, endpoints fixed, gaps at least `min_gap`.
pub fn random_positions(rng: &mut impl Rng, n: usize, min_gap: f64) -> Vec<f64> {
    let slack = 1.0 - min_gap * (n - 1) as f64;
    let mut u: Vec<f64> = (0..n - 2).map(|_| rng.random_range(0.0..slack)).collect();
    u.sort_by(f64::total_cmp);
    let mut x = vec![0.0];
    x.extend(u.iter().enumerate().map(|(i, v)| v + min_gap * (i + 1) as f64));
    x.push(1.0);
    x
}

/// Library density matrix at `t`, unpacked from the column-stacked vector.
pub fn library_rho(x: &[f64], config: &PhysicalConfig, t: f64) -> Mat {
    let g = ChainGeometry::new(x.to_vec(), config.d_ab).unwrap();
    let h = build_hamiltonian(&g, config).unwrap();
    let l = build_liouvillian(&h, config).unwrap();
    let r = propagate(&l, &initial_state(l.dim), t).unwrap();
    let k = l.dim;
    let mut m = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, r[i + k * j]);
        }
    }
    m
}

pub fn oracle_rho(x: &[f64], config: &PhysicalConfig, t: f64) -> Mat {
    let sink = config.sink_enabled;
    let h = oracle_hamiltonian(x, config.delta_e, config.coupling_j, sink);
    let mut rho0 = Mat::zeros(h.n);
    rho0.set(0, 0, C::new(1.0, 0.0));
    let kappa = config.sink_rate();
    dopri5(|r| lindblad_rhs(&h, kappa, x.len(), sink, r), &rho0, t, 1e-12, 1e-14)
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.n, b.n);
    a.a.iter().zip(&b.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub const FD_STEP: f64 = 1e-5;

pub fn numeric_gradient(params: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + FD_STEP;
            let up = f(&p);
            p[i] = orig - FD_STEP;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * FD_STEP)
        })
        .collect()
}

pub fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
    diff / scale.max(1e-12)
}

pub fn with_params(net: &Mlp, p: &[f64]) -> Mlp {
    let mut n = net.clone();
    n.params.copy_from_slice(p);
    n
}

/// Smallest |pre-activation| over the hidden units for input `x`, using the
/// documented layout: per layer an out×in row-major weight block, then biases.
pub fn kink_margin(net: &Mlp, x: &[f64]) -> f64 {
    manual_forward(net, x).1
}

/// Output pre-activations and kink margin from an independent forward pass.
pub fn manual_forward(net: &Mlp, x: &[f64]) -> (Vec<f64>, f64) {
    let dims = net.spec.layer_dims();
    let mut offset = 0;
    let mut current = x.to_vec();
    let mut margin = f64::INFINITY;
    for (l, &(fan_in, fan_out)) in dims.iter().enumerate() {
        let w = &net.params[offset..offset + fan_in * fan_out];
        let b = &net.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
        offset += fan_in * fan_out + fan_out;
        let last = l + 1 == dims.len();
        current = (0..fan_out)
            .map(|o| {
                let z = b[o] + (0..fan_in).map(|i| w[o * fan_in + i] * current[i]).sum::<f64>();
                if last {
                    z
                } else {
                    margin = margin.min(z.abs());
                    z.max(0.0)
                }
            })
            .collect();
    }
    (current, margin)
}

pub fn random_obs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..1.0)).collect()
}

/// Random input at least 1e-3 away from every ReLU kink of `net`, so that
/// central differences with step 1e-5 never straddle one.
pub fn smooth_obs(rng: &mut impl Rng, net: &Mlp) -> Vec<f64> {
    loop {
        let x = random_obs(rng, net.spec.input_dim);
        if kink_margin(net, &x) > 1e-3 {
            return x;
        }
    }
}

/// Freshly initialised biases are exactly zero, which can put a ReLU on its
/// kink when a whole upstream layer is inactive; jitter every parameter so
/// the check runs at a generic point.
pub fn generic(spec: MlpSpec, seed: u64) -> Mlp {
    let mut rng = rng_from_seed(seed);
    let mut net = Mlp::new(spec, &mut rng, 1.0);
    for p in &mut net.params {
        *p += rng.random_range(-0.1..0.1);
    }
    net
}

pub fn actor(seed: u64) -> Mlp {
    generic(MlpSpec::actor(6, &[8, 8]), seed)
}

pub fn critic(seed: u64) -> Mlp {
    generic(MlpSpec::critic(6, &[8, 8]), seed)
}

/// Samples whose probability ratios sit well inside, above and below the
/// clip interval, so finite differences never straddle a kink.
pub fn samples(net: &Mlp, seed: u64) -> Vec<Sample> {
    let mut rng = rng_from_seed(seed);
    (0..24)
        .map(|i| {
            let obs = smooth_obs(&mut rng, net);
            let action = rng.random_range(0..6);
            let lp = log_softmax(&net.forward(&obs).logits)[action];
            let shift = [0.0, -0.5, 0.5][i % 3];
            Sample {
                observation: obs,
                action,
                old_log_prob: lp + shift,
                advantage: rng.random_range(-1.0..1.0),
                value_target: rng.random_range(-1.0..1.0),
            }
        })
        .collect()
}
