//! Binary numerals: `n` is `NUMERAL bits` with little-endian `BIT0`/`BIT1`
//! digits terminated by `_0`.

use crate::kernel::{HolType, Term};

pub const NUMERAL: &str = "NUMERAL";
pub const BIT0: &str = "BIT0";
pub const BIT1: &str = "BIT1";
pub const ZERO: &str = "_0";

fn num() -> HolType {
    HolType::con("num", vec![])
}

fn unary(name: &str, arg: Term) -> Term {
    Term::comb(Term::constant(name, HolType::fun(num(), num())), arg).expect("numeral constructors are num -> num")
}

/// The digit string of `n` without the `NUMERAL` tag.
pub fn encode_bits(n: u64) -> Term {
    if n == 0 {
        Term::constant(ZERO, num())
    } else {
        unary(if n & 1 == 1 { BIT1 } else { BIT0 }, encode_bits(n >> 1))
    }
}

pub fn numeral_encode(n: u64) -> Term {
    unary(NUMERAL, encode_bits(n))
}

/// Value of a digit string built from `BIT0`, `BIT1` and `_0`.
pub fn decode_bits(t: &Term) -> Option<u64> {
    if t.is_const_named(ZERO) {
        return Some(0);
    }
    let (f, x) = t.dest_comb()?;
    let rest = decode_bits(x)?;
    let bit = if f.is_const_named(BIT0) {
        0
    } else if f.is_const_named(BIT1) {
        1
    } else {
        return None;
    };
    rest.checked_mul(2)?.checked_add(bit)
}

pub fn numeral_decode(t: &Term) -> Option<u64> {
    let (f, bits) = t.dest_comb()?;
    if f.is_const_named(NUMERAL) && t.type_of() == num() {
        decode_bits(bits)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_numerals() {
        assert_eq!(format!("{:?}", numeral_encode(0).node()).matches("NUMERAL").count(), 1);
        assert_eq!(numeral_decode(&numeral_encode(0)), Some(0));
        let four = numeral_encode(4);
        let (_, bits) = four.dest_comb().unwrap();
        let (b0, rest) = bits.dest_comb().unwrap();
        assert!(b0.is_const_named(BIT0));
        let (b0, rest) = rest.dest_comb().unwrap();
        assert!(b0.is_const_named(BIT0));
        let (b1, rest) = rest.dest_comb().unwrap();
        assert!(b1.is_const_named(BIT1));
        assert!(rest.is_const_named(ZERO));
    }

    #[test]
    fn non_numerals() {
        assert_eq!(numeral_decode(&encode_bits(3)), None);
        assert_eq!(numeral_decode(&Term::var("n", num())), None);
    }
}
