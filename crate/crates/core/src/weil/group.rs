use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

/// Generators of the modular group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Gen {
    S,
    T,
}

/// An element of SL(2, F₃), entries in 0..3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SL2F3 {
    entries: [[u8; 2]; 2],
}

impl SL2F3 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        let r = |x: i64| x.rem_euclid(3) as u8;
        let g = SL2F3 { entries: [[r(a), r(b)], [r(c), r(d)]] };
        g.is_valid().then_some(g)
    }

    fn is_valid(&self) -> bool {
        let [[a, b], [c, d]] = self.entries.map(|r| r.map(i64::from));
        (a * d - b * c).rem_euclid(3) == 1
    }

    pub fn identity() -> Self {
        SL2F3 { entries: [[1, 0], [0, 1]] }
    }

    pub fn s() -> Self {
        SL2F3 { entries: [[0, 2], [1, 0]] }
    }

    pub fn t() -> Self {
        SL2F3 { entries: [[1, 1], [0, 1]] }
    }

    pub fn generator(g: Gen) -> Self {
        match g {
            Gen::S => SL2F3::s(),
            Gen::T => SL2F3::t(),
        }
    }

    pub fn entries(&self) -> [[u8; 2]; 2] {
        self.entries
    }

    pub fn mul(&self, other: &SL2F3) -> SL2F3 {
        let mut e = [[0u8; 2]; 2];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = ((self.entries[i][0] as u32 * other.entries[0][j] as u32
                    + self.entries[i][1] as u32 * other.entries[1][j] as u32)
                    % 3) as u8;
            }
        }
        SL2F3 { entries: e }
    }

    pub fn neg(&self) -> SL2F3 {
        SL2F3 { entries: self.entries.map(|r| r.map(|x| (3 - x) % 3)) }
    }

    pub fn inverse(&self) -> SL2F3 {
        let [[a, b], [c, d]] = self.entries.map(|r| r.map(i64::from));
        SL2F3::new(d, -b, -c, a).expect("inverse has determinant 1")
    }

    pub fn from_word(word: &[Gen]) -> SL2F3 {
        word.iter().fold(SL2F3::identity(), |acc, &g| acc.mul(&SL2F3::generator(g)))
    }

    pub fn order(&self) -> usize {
        let mut p = *self;
        let mut k = 1;
        while p != SL2F3::identity() {
            p = p.mul(self);
            k += 1;
        }
        k
    }
}

impl fmt::Display for SL2F3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// The 24 elements in breadth-first order from the identity, each with the
/// shortest word reaching it (generators appended on the right, S before T).
pub fn elements_with_words() -> Vec<(SL2F3, Vec<Gen>)> {
    let mut seen: HashMap<SL2F3, usize> = HashMap::new();
    let mut out: Vec<(SL2F3, Vec<Gen>)> = Vec::new();
    let mut queue = VecDeque::from([(SL2F3::identity(), Vec::new())]);
    seen.insert(SL2F3::identity(), 0);
    while let Some((g, w)) = queue.pop_front() {
        out.push((g, w.clone()));
        for gen in [Gen::S, Gen::T] {
            let h = g.mul(&SL2F3::generator(gen));
            if !seen.contains_key(&h) {
                seen.insert(h, seen.len());
                let mut w2 = w.clone();
                w2.push(gen);
                queue.push_back((h, w2));
            }
        }
    }
    out
}

/// Conjugacy classes of SL(2, F₃), named by representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassName {
    E,
    MinusE,
    S,
    ST2,
    MinusST2,
    ST,
    MinusST,
}

impl ClassName {
    pub const ALL: [ClassName; 7] = [
        ClassName::E,
        ClassName::MinusE,
        ClassName::S,
        ClassName::ST2,
        ClassName::MinusST2,
        ClassName::ST,
        ClassName::MinusST,
    ];

    pub fn representative(self) -> SL2F3 {
        let (s, t) = (SL2F3::s(), SL2F3::t());
        match self {
            ClassName::E => SL2F3::identity(),
            ClassName::MinusE => SL2F3::identity().neg(),
            ClassName::S => s,
            ClassName::ST2 => s.mul(&t).mul(&t),
            ClassName::MinusST2 => s.mul(&t).mul(&t).neg(),
            ClassName::ST => s.mul(&t),
            ClassName::MinusST => s.mul(&t).neg(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ClassName::E => "E",
            ClassName::MinusE => "-E",
            ClassName::S => "S",
            ClassName::ST2 => "ST^2",
            ClassName::MinusST2 => "-ST^2",
            ClassName::ST => "ST",
            ClassName::MinusST => "-ST",
        }
    }

    pub fn position(self) -> usize {
        self as usize
    }
}

/// Conjugacy class of every group element.
pub fn class_of(g: &SL2F3) -> ClassName {
    let all = elements_with_words();
    for c in ClassName::ALL {
        let r = c.representative();
        if all.iter().any(|(x, _)| x.mul(&r).mul(&x.inverse()) == *g) {
            return c;
        }
    }
    unreachable!("the seven classes cover SL(2, F3)")
}

/// Class sizes derived from the group.
pub fn class_sizes() -> [usize; 7] {
    let mut sizes = [0usize; 7];
    for (g, _) in elements_with_words() {
        sizes[class_of(&g).position()] += 1;
    }
    sizes
}
