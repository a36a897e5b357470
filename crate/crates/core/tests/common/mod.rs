//! Straight-line reference computations shared by the integration tests.
//! They call only public primitives and recompute everything else by hand.
#![allow(dead_code)]

use num_rational::Ratio;

use nmcodex::auth::{mac, perm_apply, sample_perm_key, MacParams, PermKey};
use nmcodex::bits::BitString;
use nmcodex::codes::ecc_symbol_at;
use nmcodex::extractors::{ip, Toeplitz};
use nmcodex::nmext::ParameterProfile;

/// Bit `i` (0 = most significant) of an `len`-bit integer.
fn bit(v: u64, len: usize, i: usize) -> u64 {
    (v >> (len - 1 - i)) & 1
}

/// `y = T x` with `T[i][j] = t[i - j + n - 1]`, where `t` is the
/// `(n + m - 1)`-bit seed read most significant bit first.
pub fn toeplitz_by_matrix(x: u64, n: usize, seed: u64, m: usize) -> u64 {
    let d = n + m - 1;
    let mut y = 0u64;
    for i in 0..m {
        let mut acc = 0u64;
        for j in 0..n {
            acc ^= bit(seed, d, i + n - 1 - j) & bit(x, n, j);
        }
        y = (y << 1) | acc;
    }
    y
}

/// Exact `E_s TV(h_s(X), U_m)` for `X` flat on `support`, over every full seed.
pub fn lhl_distance(n: usize, m: usize, support: &[u64]) -> Ratio<u128> {
    let d = n + m - 1;
    let k = support.len() as u128;
    let outs = 1usize << m;
    let mut total: u128 = 0;
    let mut hist = vec![0u128; outs];
    for seed in 0..1u64 << d {
        hist.iter_mut().for_each(|h| *h = 0);
        for &x in support {
            hist[toeplitz_by_matrix(x, n, seed, m) as usize] += 1;
        }
        // sum |c / k - 1 / 2^m| scaled by k 2^m
        total += hist.iter().map(|&c| (c * outs as u128).abs_diff(k)).sum::<u128>();
    }
    Ratio::new(total, 2 * k * outs as u128 * (1u128 << d))
}

/// Best substitution forgery by brute force: for every observed `(msg, tag)`,
/// the adversary picks the `(msg', tag')` matching the most consistent keys.
pub fn forgery_by_enumeration(p: &MacParams) -> Ratio<u64> {
    let (m, t) = (p.msg_len(), p.tag_len());
    let keys = 1u64 << (2 * t);
    let tags: Vec<Vec<u64>> = (0..1u64 << m)
        .map(|msg| {
            let mb = BitString::from_u64(msg, m);
            (0..keys).map(|k| mac(&BitString::from_u64(k, 2 * t), &mb, p).unwrap().to_u64()).collect()
        })
        .collect();
    let mut worst = Ratio::new(0, 1);
    for (i, ti) in tags.iter().enumerate() {
        let mut success = 0u64;
        for sigma in 0..1u64 << t {
            let consistent: Vec<usize> = (0..keys as usize).filter(|&k| ti[k] == sigma).collect();
            let mut best = 0u64;
            for (j, tj) in tags.iter().enumerate() {
                if j == i {
                    continue;
                }
                let mut count = vec![0u64; 1 << t];
                for &k in &consistent {
                    count[tj[k] as usize] += 1;
                }
                best = best.max(*count.iter().max().unwrap());
            }
            success += best;
        }
        worst = worst.max(Ratio::new(success, keys));
    }
    worst
}

/// Keys from every raw `2m`-bit string.
pub fn remapped_keys(m: usize) -> Vec<PermKey> {
    (0..1u64 << (2 * m)).map(|raw| sample_perm_key(&BitString::from_u64(raw, 2 * m)).unwrap()).collect()
}

/// Max over `mu1 != mu2` and `(v1, v2)` of `|Pr[P(mu1)=v1, P(mu2)=v2] - 2^-2m|`
/// with the key uniform over `keys`.
pub fn deficit_by_enumeration(m: usize, keys: &[PermKey]) -> Ratio<u64> {
    let size = 1u64 << m;
    let perms: Vec<Vec<u64>> = keys
        .iter()
        .map(|key| (0..size).map(|mu| perm_apply(key, &BitString::from_u64(mu, m)).unwrap().to_u64()).collect())
        .collect();
    let total = perms.len() as u64;
    let target = Ratio::new(1, size * size);
    let mut worst = Ratio::new(0, 1);
    for mu1 in 0..size as usize {
        for mu2 in 0..size as usize {
            if mu1 == mu2 {
                continue;
            }
            for v1 in 0..size {
                for v2 in 0..size {
                    let c = perms.iter().filter(|p| p[mu1] == v1 && p[mu2] == v2).count() as u64;
                    let pr = Ratio::new(c, total);
                    let dev = if pr > target { pr - target } else { target - pr };
                    worst = worst.max(dev);
                }
            }
        }
    }
    worst
}

/// Registers of one extractor evaluation, recomputed step by step.
#[derive(Debug, PartialEq, Eq)]
pub struct NmextOracle {
    pub g: BitString,
    pub z0: BitString,
    pub z: Vec<BitString>,
    pub s: BitString,
    pub l: BitString,
}

fn apply(t: &Toeplitz, x: &BitString, seed: &BitString) -> BitString {
    t.apply(x, seed).unwrap()
}

/// One flip-flop step written out register by register.
pub fn flip_flop(p: &ParameterProfile, y: &BitString, x: &BitString, z: &BitString, g: bool) -> BitString {
    let r = p.roles();
    let a = apply(&r.ext1, y, &z.prefix(p.s()).unwrap());
    let c = apply(&r.ext2, z, &a);
    let b = apply(&r.ext1, y, &c);
    let z_bar = apply(&r.ext3, x, if g { &b } else { &a });
    let a_bar = apply(&r.ext1, y, &z_bar.prefix(p.s()).unwrap());
    let c_bar = apply(&r.ext2, &z_bar, &a_bar);
    let b_bar = apply(&r.ext1, y, &c_bar);
    apply(&r.ext3, x, if g { &a_bar } else { &b_bar })
}

pub fn nmext_oracle(p: &ParameterProfile, x: &BitString, y: &BitString, ablate: bool) -> NmextOracle {
    let r = p.roles();
    let k3 = 3 * p.k();
    let (x1, y1) = (x.prefix(k3).unwrap(), y.prefix(k3).unwrap());
    let idx = ip(&x1, &y1, &r.ip1).unwrap().to_u64() as usize;
    let y_padded = y.pad_right(p.n() - p.y_len());
    let g_full = BitString::concat_all([
        &x1,
        &y1,
        &ecc_symbol_at(x, idx, &r.ecc).unwrap(),
        &ecc_symbol_at(&y_padded, idx, &r.ecc).unwrap(),
    ]);
    let g = if ablate { BitString::zeros(p.a()) } else { g_full };

    let k33 = 3 * p.k().pow(3);
    let ip2_len = r.ip2.input_len();
    let x2 = x.prefix(k33).unwrap().pad_right(ip2_len - k33);
    let y2 = y.prefix(k33).unwrap().pad_right(ip2_len - k33);
    let z0 = ip(&x2, &y2, &r.ip2).unwrap();

    let mut z = Vec::new();
    let mut cur = z0.clone();
    for i in 0..p.a() {
        cur = flip_flop(p, y, x, &cur, g.get(i));
        z.push(cur.clone());
    }
    let s = apply(&r.ext4, y, &cur);
    let l = apply(&r.ext6, x, &s);
    NmextOracle { g, z0, z, s, l }
}
