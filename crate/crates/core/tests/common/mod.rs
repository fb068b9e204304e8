//! Brute-force reference implementations used only by the integration tests.
//!
//! Nothing here calls into the library's Bruhat or KL code: the order is the
//! rank-count definition evaluated cell by cell, and `P_{x,w}` follows the
//! recursion literally, summing over all of `S_n`.

#![allow(dead_code)]

use std::collections::HashMap;

pub type Perm = Vec<usize>;

pub fn all_perms(n: usize) -> Vec<Perm> {
    fn go(prefix: &mut Perm, used: &mut Vec<bool>, n: usize, out: &mut Vec<Perm>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, n, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n + 1], n, &mut out);
    out
}

pub fn length(w: &[usize]) -> usize {
    let mut c = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] > w[j] {
                c += 1;
            }
        }
    }
    c
}

fn rank(w: &[usize], p: usize, q: usize) -> i64 {
    w[..p].iter().filter(|&&v| v >= q).count() as i64
}

pub fn leq(x: &[usize], w: &[usize]) -> bool {
    let n = x.len();
    (1..=n).all(|p| (1..=n).all(|q| rank(w, p, q) >= rank(x, p, q)))
}

fn add_into(acc: &mut Vec<i64>, p: &[i64], c: i64, shift: usize) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, 0);
    }
    for (i, &a) in p.iter().enumerate() {
        acc[i + shift] += c * a;
    }
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Naive recursion with a pair memo; always peels the smallest right descent.
pub struct NaiveKl {
    all: Vec<Perm>,
    memo: HashMap<(Perm, Perm), Vec<i64>>,
}

impl NaiveKl {
    pub fn new(n: usize) -> Self {
        Self {
            all: all_perms(n),
            memo: HashMap::new(),
        }
    }

    pub fn kl(&mut self, x: &[usize], w: &[usize]) -> Vec<i64> {
        if x == w {
            return vec![1];
        }
        if !leq(x, w) {
            return vec![];
        }
        let key = (x.to_vec(), w.to_vec());
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let i = (0..w.len() - 1).find(|&i| w[i] > w[i + 1]).unwrap();
        let mut ws = w.to_vec();
        ws.swap(i, i + 1);
        let mut xs = x.to_vec();
        xs.swap(i, i + 1);
        let c = usize::from(x[i] > x[i + 1]);
        let mut acc = Vec::new();
        add_into(&mut acc, &self.kl(x, &ws), 1, c);
        add_into(&mut acc, &self.kl(&xs, &ws), 1, 1 - c);
        let lw = length(w);
        let lws = lw - 1;
        let all = self.all.clone();
        for z in &all {
            if z[i] > z[i + 1] && z.as_slice() != ws.as_slice() && leq(z, &ws) {
                let lz = length(z);
                if (lws - lz) % 2 == 1 {
                    let top = (lws - lz - 1) / 2;
                    let mu = self.kl(z, &ws).get(top).copied().unwrap_or(0);
                    if mu != 0 {
                        let pxz = self.kl(x, z);
                        add_into(&mut acc, &pxz, -mu, (lw - lz) / 2);
                    }
                }
            }
        }
        let acc = trim(acc);
        self.memo.insert(key, acc.clone());
        acc
    }
}

pub fn w0_times(w: &[usize]) -> Perm {
    let n = w.len();
    w.iter().map(|&v| n + 1 - v).collect()
}

pub fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut r = 1i64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}
