//! Univariate factorization over the rationals and prime fields.
//!
//! Over F_p: squarefree decomposition, distinct-degree and equal-degree
//! (Cantor–Zassenhaus) splitting. Over Q: squarefree decomposition, reduction
//! modulo a prime exceeding twice the Mignotte-type coefficient bound, and
//! subset recombination of the modular factors.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::intfactor::next_prime;
use super::poly::Polynomial;
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

type Mp = Vec<BigUint>;

struct Zp {
    p: BigUint,
}

impl Zp {
    fn trim(&self, mut a: Mp) -> Mp {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        a
    }

    fn inv(&self, a: &BigUint) -> BigUint {
        a.modpow(&(&self.p - BigUint::from(2u32)), &self.p)
    }

    fn add(&self, a: &Mp, b: &Mp) -> Mp {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_default();
                let y = b.get(i).cloned().unwrap_or_default();
                (x + y) % &self.p
            })
            .collect();
        self.trim(out)
    }

    fn sub(&self, a: &Mp, b: &Mp) -> Mp {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_default();
                let y = b.get(i).cloned().unwrap_or_default();
                (x + &self.p - y) % &self.p
            })
            .collect();
        self.trim(out)
    }

    fn mul(&self, a: &Mp, b: &Mp) -> Mp {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        for c in out.iter_mut() {
            *c %= &self.p;
        }
        self.trim(out)
    }

    fn div_rem(&self, a: &Mp, b: &Mp) -> (Mp, Mp) {
        let db = b.len() - 1;
        let inv = self.inv(b.last().unwrap());
        let mut r = a.clone();
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![BigUint::zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            let c = (&r[i] * &inv) % &self.p;
            if c.is_zero() {
                continue;
            }
            for (j, bc) in b.iter().enumerate() {
                let t = (&c * bc) % &self.p;
                r[i - db + j] = (&r[i - db + j] + &self.p - t) % &self.p;
            }
            q[i - db] = c;
        }
        r.truncate(db);
        (self.trim(q), self.trim(r))
    }

    fn rem(&self, a: &Mp, b: &Mp) -> Mp {
        self.div_rem(a, b).1
    }

    fn monic(&self, a: &Mp) -> Mp {
        match a.last() {
            None => Vec::new(),
            Some(lc) => {
                let inv = self.inv(lc);
                a.iter().map(|c| (c * &inv) % &self.p).collect()
            }
        }
    }

    fn gcd(&self, a: &Mp, b: &Mp) -> Mp {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    fn derivative(&self, a: &Mp) -> Mp {
        let out = a.iter().enumerate().skip(1).map(|(i, c)| (c * BigUint::from(i)) % &self.p).collect();
        self.trim(out)
    }

    fn powmod(&self, base: &Mp, e: &BigUint, m: &Mp) -> Mp {
        let mut result = vec![BigUint::one()];
        let mut b = self.rem(base, m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = self.rem(&self.mul(&result, &b), m);
            }
            if i + 1 < bits {
                b = self.rem(&self.mul(&b, &b), m);
            }
        }
        self.rem(&result, m)
    }

    fn x(&self) -> Mp {
        vec![BigUint::zero(), BigUint::one()]
    }

    /// Squarefree decomposition of a monic polynomial: (factor, multiplicity).
    fn squarefree(&self, f: &Mp) -> Vec<(Mp, usize)> {
        let mut out = Vec::new();
        if f.len() <= 1 {
            return out;
        }
        let df = self.derivative(f);
        if df.is_empty() {
            // f is a p-th power
            let p = self.p.to_usize().expect("p-th root only for word-sized primes");
            let root: Mp = f.iter().step_by(p).cloned().collect();
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * p));
            }
            return out;
        }
        let mut c = self.gcd(f, &df);
        let mut w = self.div_rem(f, &c).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = self.gcd(&w, &c);
            let z = self.div_rem(&w, &y).0;
            if z.len() > 1 {
                out.push((self.monic(&z), i));
            }
            i += 1;
            w = y;
            c = self.div_rem(&c, &w).0;
        }
        if c.len() > 1 {
            let p = self.p.to_usize().expect("p-th root only for word-sized primes");
            let root: Mp = c.iter().step_by(p).cloned().collect();
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn distinct_degree(&self, f: &Mp) -> Vec<(Mp, usize)> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let mut h = self.x();
        let mut d = 0;
        while rest.len() > 1 {
            d += 1;
            if 2 * d > rest.len() - 1 {
                let deg = rest.len() - 1;
                out.push((rest.clone(), deg));
                break;
            }
            h = self.powmod(&h, &self.p, &rest);
            let g = self.gcd(&rest, &self.sub(&h, &self.x()));
            if g.len() > 1 {
                rest = self.div_rem(&rest, &g).0;
                h = self.rem(&h, &rest);
                out.push((g, d));
            }
        }
        out
    }

    /// Equal-degree splitting into irreducible factors of degree d.
    fn equal_degree(&self, f: &Mp, d: usize, rng: &mut ChaCha8Rng) -> Vec<Mp> {
        let n = f.len() - 1;
        if n == d {
            return vec![self.monic(f)];
        }
        let two = BigUint::from(2u32);
        loop {
            let a: Mp = self.trim((0..n).map(|_| rng.gen_biguint_below(&self.p)).collect());
            if a.len() <= 1 {
                continue;
            }
            let b = if self.p == two {
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..d {
                    t = self.rem(&self.mul(&t, &t), f);
                    acc = self.add(&acc, &t);
                }
                acc
            } else {
                let e = (self.p.pow(d as u32) - BigUint::one()) / &two;
                self.sub(&self.powmod(&a, &e, f), &vec![BigUint::one()])
            };
            let g = self.gcd(f, &b);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.div_rem(f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&h, d, rng));
                return out;
            }
        }
    }

    /// Monic irreducible factors of a monic squarefree polynomial.
    fn factor_squarefree(&self, f: &Mp, rng: &mut ChaCha8Rng) -> Vec<Mp> {
        let mut out = Vec::new();
        for (g, d) in self.distinct_degree(f) {
            out.extend(self.equal_degree(&g, d, rng));
        }
        out
    }
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_cafe)
}

/// Monic irreducible factors with multiplicities, sorted in place order.
pub fn factor(f: &Polynomial) -> Result<Vec<(Polynomial, usize)>> {
    if f.is_zero() {
        return Err(Error::invalid("cannot factor the zero polynomial"));
    }
    let mut out = match f.field() {
        Some(Field::Prime(p)) => factor_prime(f, p),
        Some(Field::Rational) | None => factor_rational(f),
        Some(Field::Quad(_)) => return Err(Error::Unsupported("factorization over quadratic fields".into())),
    };
    out.sort();
    Ok(out)
}

/// Distinct monic irreducible factors.
pub fn irreducible_factors(f: &Polynomial) -> Result<Vec<Polynomial>> {
    Ok(factor(f)?.into_iter().map(|(g, _)| g).collect())
}

pub fn is_irreducible(f: &Polynomial) -> Result<bool> {
    if f.deg0() == 0 {
        return Ok(false);
    }
    let fs = factor(f)?;
    Ok(fs.len() == 1 && fs[0].1 == 1)
}

fn factor_prime(f: &Polynomial, p: u64) -> Vec<(Polynomial, usize)> {
    let zp = Zp { p: BigUint::from(p) };
    let mp: Mp = f
        .coeffs()
        .iter()
        .map(|c| match Field::Prime(p).coerce(c).unwrap() {
            Scalar::Prime { value, .. } => BigUint::from(value),
            _ => unreachable!(),
        })
        .collect();
    let mp = zp.monic(&zp.trim(mp));
    let mut rng = rng();
    let mut out = Vec::new();
    for (g, m) in zp.squarefree(&mp) {
        for h in zp.factor_squarefree(&g, &mut rng) {
            let poly = Polynomial::new(
                h.iter().map(|c| Scalar::Prime { value: c.to_u64().unwrap(), modulus: p }).collect(),
            );
            out.push((poly, m));
        }
    }
    out
}

/// Integer primitive associate of a rational polynomial (positive leading coefficient).
fn primitive_integer(f: &Polynomial) -> Vec<BigInt> {
    let rats: Vec<BigRational> = f.coeffs().iter().map(|c| c.as_rational().expect("rational coefficients").clone()).collect();
    let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    ints.iter().map(|c| c / &content * &sign).collect()
}

fn int_to_poly(c: &[BigInt]) -> Polynomial {
    Polynomial::new(c.iter().map(|x| Scalar::Rational(BigRational::from_integer(x.clone()))).collect())
}

fn factor_rational(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    // Yun's squarefree decomposition over Q
    let f = f.monic();
    let mut out = Vec::new();
    if f.deg0() == 0 {
        return out;
    }
    let df = f.derivative();
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c);
    let mut i = 1;
    let mut parts = Vec::new();
    while w.deg0() > 0 {
        let y = w.gcd(&c);
        let z = w.exact_div(&y);
        if z.deg0() > 0 {
            parts.push((z, i));
        }
        i += 1;
        w = y;
        c = c.exact_div(&w);
    }
    for (g, m) in parts {
        for h in factor_squarefree_rational(&g) {
            out.push((h, m));
        }
    }
    out
}

fn factor_squarefree_rational(g: &Polynomial) -> Vec<Polynomial> {
    let n = g.deg0();
    if n <= 1 {
        return vec![g.monic()];
    }
    let ints = primitive_integer(g);
    let maxc = ints.iter().map(|c| c.magnitude().clone()).max().unwrap();
    let lc = ints.last().unwrap().magnitude().clone();
    let bound = &lc * (BigUint::one() << n) * BigUint::from(n + 1) * &maxc;
    let mut p = next_prime(&(bound * BigUint::from(2u32)));
    let zp = loop {
        let zp = Zp { p: p.clone() };
        if !(&lc % &p).is_zero() {
            let mp = zp.trim(ints.iter().map(|c| c.mod_floor(&BigInt::from(p.clone())).to_biguint().unwrap()).collect());
            let d = zp.derivative(&mp);
            if zp.gcd(&mp, &d).len() == 1 {
                break zp;
            }
        }
        p = next_prime(&p);
    };
    let pi = BigInt::from(zp.p.clone());
    let half = &pi / BigInt::from(2);
    let mp = zp.monic(&zp.trim(ints.iter().map(|c| c.mod_floor(&pi).to_biguint().unwrap()).collect()));
    let mut modular = zp.factor_squarefree(&mp, &mut rng());
    let mut current = int_to_poly(&ints);
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= modular.len() {
        for subset in subsets(modular.len(), size) {
            let lc_cur = primitive_integer(&current).last().unwrap().clone();
            let lcm = BigUint::try_from(lc_cur.mod_floor(&pi)).unwrap();
            let mut prod = vec![lcm];
            for &k in &subset {
                prod = zp.mul(&prod, &modular[k]);
            }
            let lifted: Vec<BigInt> = prod
                .iter()
                .map(|c| {
                    let c = BigInt::from(c.clone());
                    if c > half {
                        c - &pi
                    } else {
                        c
                    }
                })
                .collect();
            let candidate = int_to_poly(&primitive_integer(&int_to_poly(&lifted)));
            let (q, r) = current.div_rem(&candidate);
            if r.is_zero() {
                found.push(candidate.monic());
                current = q;
                let mut k = 0;
                modular.retain(|_| {
                    let keep = !subset.contains(&k);
                    k += 1;
                    keep
                });
                continue 'outer;
            }
        }
        size += 1;
    }
    if current.deg0() > 0 {
        found.push(current.monic());
    }
    found
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(Field::Rational, c)
    }

    fn product(fs: &[(Polynomial, usize)]) -> Polynomial {
        fs.iter().fold(q(&[1]), |acc, (g, m)| &acc * &g.pow(*m as u32))
    }

    #[test]
    fn rational_factorization() {
        // (x^2+1)^2 (x-3)(2x+1)(x^4 - 10x^2 + 1)
        let f = &(&(&q(&[1, 0, 1]).pow(2) * &q(&[-3, 1])) * &q(&[1, 2])) * &q(&[1, 0, -10, 0, 1]);
        let fs = factor(&f).unwrap();
        assert_eq!(fs.len(), 4);
        assert_eq!(product(&fs), f.monic());
        assert!(fs.iter().all(|(g, _)| g.is_monic()));
        assert!(fs.contains(&(q(&[1, 0, 1]), 2)));
        assert!(fs.contains(&(q(&[1, 0, -10, 0, 1]), 1)));
    }

    #[test]
    fn swinnerton_dyer_is_irreducible() {
        assert!(is_irreducible(&q(&[1, 0, -10, 0, 1])).unwrap());
        assert!(!is_irreducible(&q(&[-4, 0, 1])).unwrap());
    }

    #[test]
    fn prime_field_factorization() {
        let f7 = Field::Prime(7);
        // x^7 - x splits into all linear factors over F_7
        let mut c = vec![0i64; 8];
        c[7] = 1;
        c[1] = -1;
        let f = Polynomial::from_ints(f7, &c);
        let fs = factor(&f).unwrap();
        assert_eq!(fs.len(), 7);
        // x^2 + 1 is irreducible mod 7 but not mod 5
        assert!(is_irreducible(&Polynomial::from_ints(f7, &[1, 0, 1])).unwrap());
        assert!(!is_irreducible(&Polynomial::from_ints(Field::Prime(5), &[1, 0, 1])).unwrap());
    }

    #[test]
    fn characteristic_two_powers() {
        let f2 = Field::Prime(2);
        // (x^2 + x + 1)^2 = x^4 + x^2 + 1
        let f = Polynomial::from_ints(f2, &[1, 0, 1, 0, 1]);
        let fs = factor(&f).unwrap();
        assert_eq!(fs, vec![(Polynomial::from_ints(f2, &[1, 1, 1]), 2)]);
    }
}
