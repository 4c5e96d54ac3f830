//! Boolean operations abstracted over a carrier, so that actor behavior is written
//! once and used both for simulation (`bool`) and for clause generation.

use std::fmt::Debug;

pub trait Logic {
    type B: Copy + Debug;

    fn constant(&mut self, v: bool) -> Self::B;
    fn not(&mut self, a: Self::B) -> Self::B;
    fn and(&mut self, a: Self::B, b: Self::B) -> Self::B;
    fn or(&mut self, a: Self::B, b: Self::B) -> Self::B;

    fn and_all(&mut self, xs: &[Self::B]) -> Self::B {
        let mut acc = self.constant(true);
        for &x in xs {
            acc = self.and(acc, x);
        }
        acc
    }

    fn or_all(&mut self, xs: &[Self::B]) -> Self::B {
        let mut acc = self.constant(false);
        for &x in xs {
            acc = self.or(acc, x);
        }
        acc
    }

    fn ite(&mut self, c: Self::B, t: Self::B, e: Self::B) -> Self::B {
        let a = self.and(c, t);
        let nc = self.not(c);
        let b = self.and(nc, e);
        self.or(a, b)
    }

    fn xor(&mut self, a: Self::B, b: Self::B) -> Self::B {
        let nb = self.not(b);
        self.ite(a, nb, b)
    }

    fn eq(&mut self, a: Self::B, b: Self::B) -> Self::B {
        let x = self.xor(a, b);
        self.not(x)
    }
}

/// Plain evaluation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Concrete;

impl Logic for Concrete {
    type B = bool;

    fn constant(&mut self, v: bool) -> bool {
        v
    }

    fn not(&mut self, a: bool) -> bool {
        !a
    }

    fn and(&mut self, a: bool, b: bool) -> bool {
        a && b
    }

    fn or(&mut self, a: bool, b: bool) -> bool {
        a || b
    }
}

/// A port value over a logic carrier: `dash` set means unconstrained, in which
/// case `val` is kept false.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sig<B> {
    pub dash: B,
    pub val: B,
}

impl<B: Copy> Sig<B> {
    pub fn boolean<L: Logic<B = B>>(l: &mut L, v: B) -> Sig<B> {
        Sig {
            dash: l.constant(false),
            val: v,
        }
    }

    pub fn dash<L: Logic<B = B>>(l: &mut L) -> Sig<B> {
        Sig {
            dash: l.constant(true),
            val: l.constant(false),
        }
    }

    /// True-or-dash from a single bit: `v ? T : Dash`.
    pub fn true_or_dash<L: Logic<B = B>>(l: &mut L, v: B) -> Sig<B> {
        Sig {
            dash: l.not(v),
            val: v,
        }
    }

    /// The value is definitely true.
    pub fn is_true<L: Logic<B = B>>(self, l: &mut L) -> B {
        let nd = l.not(self.dash);
        l.and(nd, self.val)
    }

    /// The value is definitely false.
    pub fn is_false<L: Logic<B = B>>(self, l: &mut L) -> B {
        let nd = l.not(self.dash);
        let nv = l.not(self.val);
        l.and(nd, nv)
    }
}
