//! Segmented sieve of Eratosthenes.
//!
//! Base primes up to `sqrt(limit)` are sieved once; any window `[lo, hi]` with
//! `hi <= limit` is then sieved on its own, in blocks of [`SEGMENT`] numbers.

const SEGMENT: u64 = 1 << 15;

#[derive(Clone, Debug)]
pub struct SegmentedSieve {
    limit: u64,
    base: Vec<u64>,
}

fn simple_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl SegmentedSieve {
    pub fn new(limit: u64) -> Self {
        SegmentedSieve {
            limit,
            base: simple_sieve(isqrt(limit)),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes in `[lo, hi]`, clipped to the sieve limit.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        let lo = lo.max(2);
        let hi = hi.min(self.limit);
        let mut out = Vec::new();
        if lo > hi {
            return out;
        }
        let mut start = lo;
        while start <= hi {
            let end = (start + SEGMENT - 1).min(hi);
            let mut composite = vec![false; (end - start + 1) as usize];
            for &p in &self.base {
                if p * p > end {
                    break;
                }
                let first = (start.div_ceil(p) * p).max(p * p);
                let mut m = first;
                while m <= end {
                    composite[(m - start) as usize] = true;
                    m += p;
                }
            }
            out.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !**c)
                    .map(|(i, _)| start + i as u64),
            );
            start = end + 1;
        }
        out
    }

    pub fn primes_up_to(&self, hi: u64) -> Vec<u64> {
        self.primes_in(2, hi)
    }

    /// Smallest prime in `[lo, hi]`, if any.
    pub fn first_prime_in(&self, lo: u64, hi: u64) -> Option<u64> {
        self.primes_in(lo, hi).first().copied()
    }
}
