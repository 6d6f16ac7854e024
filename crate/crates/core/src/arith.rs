//! Elementary integer arithmetic: modular operations on machine words,
//! deterministic Miller-Rabin, factorisation by trial division, CRT,
//! primitive roots and square roots mod p.
//!
//! Everything here works on `u64`/`i64` with `u128` intermediates; callers
//! needing true big integers use `num_bigint` directly.

use num_integer::Integer;

/// (a * b) mod m without overflow.
#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn submod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b { a - b } else { m - (b - a) }
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Inverse of a mod m, if gcd(a, m) = 1.
pub fn invmod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd((a % m) as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation by trial division; panics if a cofactor above
/// the trial bound squared remains composite (not expected for our sizes).
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let mut next = Vec::new();
        for d in &ds {
            let mut pe = 1u64;
            for _ in 0..=e {
                next.push(d * pe);
                pe *= p;
            }
        }
        ds = next;
    }
    ds.sort_unstable();
    ds
}

/// v_p(n); n must be nonzero.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Multiplicative order of a modulo m (gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    assert_eq!(a.gcd(&m), 1, "mult_order needs gcd(a,m)=1");
    let lambda = carmichael_exponent(m);
    let mut ord = lambda;
    for (p, _) in factor(lambda) {
        while ord % p == 0 && powmod(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    assert_eq!(powmod(a, ord, m), 1);
    ord
}

/// Carmichael function lambda(m): exponent of (Z/m)^*.
pub fn carmichael_exponent(m: u64) -> u64 {
    let mut lambda = 1u64;
    for (p, e) in factor(m) {
        let l = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1u64 << (e - 2),
            }
        } else {
            p.pow(e - 1) * (p - 1)
        };
        lambda = lambda.lcm(&l);
    }
    lambda
}

/// Least primitive root modulo an odd prime l.
pub fn least_primitive_root(l: u64) -> u64 {
    assert!(is_prime(l) && l > 2);
    let fs = factor(l - 1);
    'cand: for g in 2..l {
        for &(q, _) in &fs {
            if powmod(g, (l - 1) / q, l) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("no primitive root found");
}

/// CRT for two coprime moduli: x = a (mod m), x = b (mod n).
pub fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    let (g, inv, _) = ext_gcd(m as i128, n as i128);
    assert_eq!(g, 1);
    let inv = inv.rem_euclid(n as i128) as u64;
    // x = a + m * ((b - a) * m^{-1} mod n)
    let diff = submod(b % n, a % n, n);
    let t = mulmod(diff, inv, n);
    a + m * t
}

/// Legendre/Jacobi symbol (a|n) for odd n > 0.
pub fn jacobi(mut a: i64, mut n: u64) -> i32 {
    assert!(n % 2 == 1 && n > 0);
    a = a.rem_euclid(n as i64);
    let mut a = a as u64;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Square root of a modulo odd prime p (Tonelli-Shanks); None for non-residues.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut t2 = t;
        let mut i = 0;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// Primes in [2, bound] by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Deterministic splitmix64 stream; used where reproducible pseudo-random
/// choices are needed (polynomial splitting, Monte-Carlo certification).
#[derive(Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            primes_up_to(99)
        );
        assert!(is_prime(472_558_791_937));
        assert!(!is_prime(472_558_791_939));
    }

    #[test]
    fn order_and_roots() {
        // multiplicative order of 5 mod 6 is 2
        assert_eq!(mult_order(5, 6), 2);
        assert_eq!(mult_order(101 % 20, 20), 1);
        assert_eq!(least_primitive_root(11), 2);
        assert_eq!(least_primitive_root(61), 2);
    }

    #[test]
    fn crt_and_jacobi() {
        let x = crt_pair(2, 5, 3, 7);
        assert_eq!(x % 5, 2);
        assert_eq!(x % 7, 3);
        // (-11|61) = -1, used to pin the quadratic character value at -11
        assert_eq!(jacobi(-11, 61), -1);
        assert_eq!(jacobi(3, 7), -1);
    }

    #[test]
    fn sqrt_mod_roundtrip() {
        for p in [5u64, 13, 101, 1451] {
            for a in 1..30 {
                if let Some(r) = sqrt_mod(a % p, p) {
                    assert_eq!(mulmod(r, r, p), a % p);
                }
            }
        }
    }

    #[test]
    fn mult_order_of_five_mod_six_examples() {
        // residue degrees used by the p-adic layer
        assert_eq!(mult_order(5, 6), 2);
        assert_eq!(mult_order(7 % 8, 8), 2);
        assert_eq!(mult_order(101 % 61, 61), 12);
    }
}
