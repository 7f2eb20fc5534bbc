//! The partial order on exponent pairs and the order of a bivariate series.

use serde::Serialize;

/// Order of a series: an exponent pair `(s, s')`, or infinite for the zero series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Order {
    /// Exponent pair `(s, s')`.
    Finite(u32, u32),
    /// Order of the zero series / of a disconnected polynomial graph.
    Infinite,
}

/// Outcome of comparing two exponent pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderRelation {
    /// `a ⪰ b` and not `b ⪰ a`.
    Geq,
    /// `b ⪰ a` and not `a ⪰ b`.
    Leq,
    /// Both relations hold.
    Equal,
    /// Neither relation holds.
    Incomparable,
}

/// `a ⪰ b` iff `a.s >= b.s` and `a.s + a.s' >= b.s + b.s'`.
pub fn dominates(a: (u32, u32), b: (u32, u32)) -> bool {
    a.0 >= b.0 && a.0 + a.1 >= b.0 + b.1
}

/// Compares two exponent pairs under `⪰`.
pub fn order_cmp(a: (u32, u32), b: (u32, u32)) -> OrderRelation {
    match (dominates(a, b), dominates(b, a)) {
        (true, true) => OrderRelation::Equal,
        (true, false) => OrderRelation::Geq,
        (false, true) => OrderRelation::Leq,
        (false, false) => OrderRelation::Incomparable,
    }
}

impl Order {
    /// `self ⪰ other`; the infinite order dominates everything.
    pub fn geq(self, other: Order) -> bool {
        match (self, other) {
            (Order::Infinite, _) => true,
            (Order::Finite(..), Order::Infinite) => false,
            (Order::Finite(a, b), Order::Finite(c, d)) => dominates((a, b), (c, d)),
        }
    }

    /// Componentwise sum (infinite is absorbing).
    pub fn add(self, other: Order) -> Order {
        match (self, other) {
            (Order::Finite(a, b), Order::Finite(c, d)) => Order::Finite(a + c, b + d),
            _ => Order::Infinite,
        }
    }

    /// `⪰`-infimum of two orders: `(min s, min(s + s') - min s)`.
    pub fn inf(self, other: Order) -> Order {
        match (self, other) {
            (Order::Infinite, o) | (o, Order::Infinite) => o,
            (Order::Finite(a, b), Order::Finite(c, d)) => {
                let s = a.min(c);
                Order::Finite(s, (a + b).min(c + d) - s)
            }
        }
    }

    /// `⪰`-infimum of a finite set of exponent pairs (infinite when empty).
    pub fn infimum(points: impl IntoIterator<Item = (u32, u32)>) -> Order {
        points
            .into_iter()
            .fold(Order::Infinite, |acc, (s, t)| acc.inf(Order::Finite(s, t)))
    }
}
