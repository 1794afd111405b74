//! Counter-based random streams (Philox4x32-10).
//!
//! A stream is addressed by `(seed, stream_index)`; the `counter` advances one
//! Philox block per four 32-bit outputs. The output is a pure function of
//! `(seed, stream_index, counter)`, so parallel work items that each own a
//! stream reproduce bit-identical results regardless of scheduling.

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = (a as u64) * (b as u64);
    ((p >> 32) as u32, p as u32)
}

#[inline]
fn philox_round(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
    let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
    [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0]
}

/// The Philox4x32 block function with 10 rounds.
pub fn philox4x32_10(ctr: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = ctr;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        c = philox_round(c, k);
    }
    c
}

/// Deterministic generator of uniforms, normals and exponentials.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: [u32; 2],
    stream: u64,
    counter: u64,
    buf: [u32; 4],
    pos: usize,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        RngStream {
            key: [seed as u32, (seed >> 32) as u32],
            stream: stream_index,
            counter: 0,
            buf: [0; 4],
            pos: 4,
            spare_normal: None,
        }
    }

    /// Jump to an absolute block counter.
    pub fn at_counter(seed: u64, stream_index: u64, counter: u64) -> Self {
        let mut s = Self::new(seed, stream_index);
        s.counter = counter;
        s
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    fn refill(&mut self) {
        let ctr = [
            self.counter as u32,
            (self.counter >> 32) as u32,
            self.stream as u32,
            (self.stream >> 32) as u32,
        ];
        self.buf = philox4x32_10(ctr, self.key);
        self.counter = self.counter.wrapping_add(1);
        self.pos = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            self.refill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        v
    }

    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        let bits = self.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n.saturating_sub(1))
    }

    /// Standard normal via the polar Box-Muller transform.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * m);
                return u * m;
            }
        }
    }

    /// Exponential with unit mean.
    pub fn exponential(&mut self) -> f64 {
        -self.uniform().ln()
    }
}

/// Mixes a seed with a purpose tag so unrelated consumers of the same user
/// seed draw from disjoint stream families.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
