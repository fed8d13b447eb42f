//! Exact dyadic arithmetic shared by the property tests.

#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;

/// Exact value `m · 2^e` of a finite double.
#[derive(Clone)]
pub struct Dyadic {
    pub m: BigInt,
    pub e: i64,
}

impl Dyadic {
    pub fn of(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Dyadic { m: BigInt::from(0), e: 0 };
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let m = BigInt::from(mant);
        Dyadic { m: if x < 0.0 { -m } else { m }, e }
    }

    pub fn align(&self, other: &Dyadic) -> (BigInt, BigInt) {
        let e = self.e.min(other.e);
        (&self.m << (self.e - e) as usize, &other.m << (other.e - e) as usize)
    }

    pub fn add(&self, o: &Dyadic) -> Dyadic {
        let (a, b) = self.align(o);
        Dyadic { m: a + b, e: self.e.min(o.e) }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { m: -self.m.clone(), e: self.e }
    }

    pub fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }

    pub fn cmp(&self, o: &Dyadic) -> Ordering {
        let (a, b) = self.align(o);
        a.cmp(&b)
    }
}
