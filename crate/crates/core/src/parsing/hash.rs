//! Karp-Rabin style polynomial rolling hash over fixed-width byte windows.

use super::ParseError;

/// The Mersenne prime 2^61 - 1, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// A hash over every width-`w` window of a byte string, plus the trigger
/// test that decides where a prefix-free parse breaks.
pub trait WindowHasher {
    fn width(&self) -> usize;

    fn trigger_modulus(&self) -> u64;

    /// One hash per complete window, aligned with the window start.
    fn roll_windows(&self, text: &[u8]) -> Result<Vec<u64>, ParseError>;

    fn is_trigger(&self, hash: u64) -> bool {
        hash.is_multiple_of(self.trigger_modulus())
    }
}

/// Polynomial hash `sum(c_i * base^(w-1-i)) mod modulus`, updated by the
/// usual remove-leading/append-trailing rolling step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RollingHasher {
    base: u64,
    modulus: u64,
    width: usize,
    trigger_modulus: u64,
}

impl RollingHasher {
    pub fn new(base: u64, modulus: u64, width: usize, trigger_modulus: u64) -> Result<Self, ParseError> {
        if width == 0 {
            return Err(ParseError::InvalidParams("window width must be at least 1".into()));
        }
        if base < 256 {
            return Err(ParseError::InvalidParams(format!(
                "base {base} is smaller than the byte alphabet"
            )));
        }
        if modulus <= base || !is_prime(modulus) {
            return Err(ParseError::InvalidParams(format!(
                "modulus {modulus} must be a prime larger than the base"
            )));
        }
        if trigger_modulus < 2 {
            return Err(ParseError::InvalidParams("trigger modulus must be at least 2".into()));
        }
        Ok(Self {
            base,
            modulus,
            width,
            trigger_modulus,
        })
    }

    /// Base 256 modulo 2^61 - 1, the hash used throughout the crate's examples.
    pub fn with_defaults(width: usize, trigger_modulus: u64) -> Result<Self, ParseError> {
        Self::new(256, MERSENNE_61, width, trigger_modulus)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// Direct evaluation of one window, without rolling.
    pub fn hash_window(&self, window: &[u8]) -> u64 {
        window
            .iter()
            .fold(0, |h, &c| (self.mul(h, self.base) + c as u64) % self.modulus)
    }
}

impl WindowHasher for RollingHasher {
    fn width(&self) -> usize {
        self.width
    }

    fn trigger_modulus(&self) -> u64 {
        self.trigger_modulus
    }

    fn roll_windows(&self, text: &[u8]) -> Result<Vec<u64>, ParseError> {
        let w = self.width;
        if text.len() < w {
            return Err(ParseError::TextShorterThanWindow {
                len: text.len(),
                width: w,
            });
        }
        // base^(w-1), the weight of the character leaving the window
        let lead = (1..w).fold(1, |acc, _| self.mul(acc, self.base));
        let mut out = Vec::with_capacity(text.len() - w + 1);
        let mut h = self.hash_window(&text[..w]);
        out.push(h);
        for i in w..text.len() {
            let outgoing = self.mul(text[i - w] as u64, lead);
            h = (h + self.modulus - outgoing) % self.modulus;
            h = (self.mul(h, self.base) + text[i] as u64) % self.modulus;
            out.push(h);
        }
        Ok(out)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    // Horner evaluation with plain u128 arithmetic, kept separate from the
    // hasher's own code path.
    fn direct(window: &[u8], base: u128, modulus: u128) -> u64 {
        let mut h: u128 = 0;
        for &c in window {
            h = (h * base + c as u128) % modulus;
        }
        h as u64
    }

    #[test]
    fn rolled_equals_direct_on_abcd() {
        let hasher = RollingHasher::with_defaults(2, 50).unwrap();
        let rolled = hasher.roll_windows(b"ABCD").unwrap();
        let expected: Vec<u64> = [b"AB", b"BC", b"CD"]
            .iter()
            .map(|w| direct(*w, 256, MERSENNE_61 as u128))
            .collect();
        assert_eq!(rolled, expected);
    }

    #[test]
    fn acg_single_window() {
        let hasher = RollingHasher::with_defaults(3, 50).unwrap();
        let rolled = hasher.roll_windows(b"ACG").unwrap();
        // 65 * 256^2 + 67 * 256 + 71
        assert_eq!(rolled, vec![65 * 65536 + 67 * 256 + 71]);
        assert_eq!(rolled[0], direct(b"ACG", 256, MERSENNE_61 as u128));
    }

    #[test]
    fn short_text_is_an_error() {
        let hasher = RollingHasher::with_defaults(2, 50).unwrap();
        assert_eq!(
            hasher.roll_windows(b"A"),
            Err(ParseError::TextShorterThanWindow { len: 1, width: 2 })
        );
    }

    #[test]
    fn rejects_bad_params() {
        assert!(RollingHasher::new(256, 1 << 61, 4, 10).is_err());
        assert!(RollingHasher::new(10, MERSENNE_61, 4, 10).is_err());
        assert!(RollingHasher::new(256, MERSENNE_61, 0, 10).is_err());
        assert!(RollingHasher::new(256, MERSENNE_61, 4, 1).is_err());
        assert!(RollingHasher::new(257, 1_000_000_007, 4, 2).is_ok());
    }

    #[test]
    fn primality() {
        assert!(is_prime(MERSENNE_61));
        assert!(!is_prime(MERSENNE_61 - 2));
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    proptest::proptest! {
        #[test]
        fn rolling_matches_direct(text in proptest::collection::vec(proptest::num::u8::ANY, 1..200), w in 1usize..16) {
            let hasher = RollingHasher::with_defaults(w, 7).unwrap();
            match hasher.roll_windows(&text) {
                Err(_) => proptest::prop_assert!(text.len() < w),
                Ok(rolled) => {
                    proptest::prop_assert_eq!(rolled.len(), text.len() - w + 1);
                    for (i, h) in rolled.iter().enumerate() {
                        proptest::prop_assert_eq!(*h, direct(&text[i..i + w], 256, MERSENNE_61 as u128));
                    }
                    proptest::prop_assert_eq!(hasher.roll_windows(&text).unwrap(), rolled);
                }
            }
        }
    }
}
