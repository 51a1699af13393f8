use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{Element, FqmError, QuadraticModule, TypeClass};

/// A permutation of the module elements preserving q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Isometry {
    images: Vec<Element>,
}

impl Isometry {
    pub fn identity(m: &QuadraticModule) -> Self {
        Isometry { images: m.elements().collect() }
    }

    pub fn negation(m: &QuadraticModule) -> Self {
        Isometry { images: m.elements().map(|e| m.neg(e)).collect() }
    }

    /// Validates that `images` is an isometry of `m`.
    pub fn from_images(m: &QuadraticModule, images: Vec<Element>) -> Result<Self, FqmError> {
        let g = Isometry { images };
        if g.images.len() == m.size() && g.is_isometry_of(m) {
            Ok(g)
        } else {
            Err(FqmError::NotIsometry)
        }
    }

    pub fn apply(&self, e: Element) -> Element {
        self.images[e.index()]
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { images: other.images.iter().map(|&e| self.apply(e)).collect() }
    }

    pub fn inverse(&self) -> Isometry {
        let mut images = vec![Element(0); self.images.len()];
        for (i, &e) in self.images.iter().enumerate() {
            images[e.index()] = Element(i as u32);
        }
        Isometry { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, e)| e.index() == i)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }

    /// Bijective, additive and q-preserving on `m`.
    pub fn is_isometry_of(&self, m: &QuadraticModule) -> bool {
        let distinct: HashSet<Element> = self.images.iter().copied().collect();
        distinct.len() == m.size()
            && m.elements().all(|x| m.q_scaled(x) == m.q_scaled(self.apply(x)))
            && (0..m.rank()).all(|i| {
                let g = m.generator(i);
                m.elements().all(|x| self.apply(m.add(x, g)) == m.add(self.apply(x), self.apply(g)))
            })
    }
}

/// x ↦ x − B₃(x, α)·Q₃(α)⁻¹·α on a ternary module.
pub fn reflect(m: &QuadraticModule, alpha: Element) -> Result<Isometry, FqmError> {
    let q = m.q3(alpha)?;
    if q == 0 {
        return Err(FqmError::Isotropic { element: m.label(alpha) });
    }
    let mut images = Vec::with_capacity(m.size());
    for x in m.elements() {
        // q is its own inverse in F₃
        let c = (m.b3(x, alpha)? * q) % 3;
        images.push(m.add(x, m.mul(-(c as i64), alpha)));
    }
    Ok(Isometry { images })
}

#[derive(Debug, Clone)]
pub struct OrthogonalGroup {
    elements: Vec<Isometry>,
    generators: Vec<Isometry>,
    orbits: Vec<Vec<Element>>,
}

impl OrthogonalGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Isometry] {
        &self.elements
    }

    pub fn generators(&self) -> &[Isometry] {
        &self.generators
    }

    /// Orbits on nonzero elements, each sorted, ordered by least element.
    pub fn orbits(&self) -> &[Vec<Element>] {
        &self.orbits
    }

    pub fn contains(&self, g: &Isometry) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_central(&self, g: &Isometry) -> bool {
        self.elements.iter().all(|h| h.compose(g) == g.compose(h))
    }
}

fn closure(m: &QuadraticModule, gens: &[Isometry]) -> HashSet<Isometry> {
    let id = Isometry::identity(m);
    let mut seen: HashSet<Isometry> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in gens {
            let h = s.compose(&g);
            if seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen
}

/// Exhaustive enumeration of O(q) by backtracking over generator images,
/// pruned on q-values, orders and pairings.
pub fn orthogonal_group(m: &QuadraticModule) -> OrthogonalGroup {
    let rank = m.rank();
    let gens: Vec<Element> = (0..rank).map(|i| m.generator(i)).collect();
    let candidates: Vec<Vec<Element>> = (0..rank)
        .map(|i| {
            m.elements()
                .filter(|&e| m.q_scaled(e) == m.q_scaled(gens[i]) && m.mul(m.orders()[i] as i64, e) == m.zero())
                .collect()
        })
        .collect();

    let mut found = Vec::new();
    let mut chosen: Vec<Element> = Vec::with_capacity(rank);
    search(m, &gens, &candidates, &mut chosen, &mut found);
    found.sort();

    let mut orbits: Vec<Vec<Element>> = Vec::new();
    let mut placed = vec![false; m.size()];
    for x in m.elements().skip(1) {
        if placed[x.index()] {
            continue;
        }
        let orbit: BTreeSet<Element> = found.iter().map(|g| g.apply(x)).collect();
        for e in &orbit {
            placed[e.index()] = true;
        }
        orbits.push(orbit.into_iter().collect());
    }

    let mut pool: Vec<Isometry> = Vec::new();
    if m.is_ternary() {
        let mut roots: BTreeSet<Element> = BTreeSet::new();
        for e in m.elements() {
            if m.q3(e).is_ok_and(|q| q != 0) {
                roots.insert(m.sign_canonical(e));
            }
        }
        pool.extend(roots.into_iter().filter_map(|a| reflect(m, a).ok()));
    }
    pool.extend(found.iter().cloned());
    let mut generators: Vec<Isometry> = Vec::new();
    let mut span = closure(m, &generators);
    for g in pool {
        if span.len() == found.len() {
            break;
        }
        if !span.contains(&g) {
            generators.push(g);
            span = closure(m, &generators);
        }
    }

    OrthogonalGroup { elements: found, generators, orbits }
}

fn search(
    m: &QuadraticModule,
    gens: &[Element],
    candidates: &[Vec<Element>],
    chosen: &mut Vec<Element>,
    found: &mut Vec<Isometry>,
) {
    let i = chosen.len();
    if i == gens.len() {
        let images: Vec<Element> = m
            .elements()
            .map(|x| {
                let c = m.coords(x);
                chosen.iter().zip(&c).fold(m.zero(), |acc, (&img, &k)| m.add(acc, m.mul(k, img)))
            })
            .collect();
        let g = Isometry { images };
        if g.is_isometry_of(m) {
            found.push(g);
        }
        return;
    }
    for &y in &candidates[i] {
        if (0..i).all(|j| m.b_scaled(y, chosen[j]) == m.b_scaled(gens[i], gens[j])) {
            chosen.push(y);
            search(m, gens, candidates, chosen, found);
            chosen.pop();
        }
    }
}

/// An orthogonal basis made of one long element and short elements, each
/// stored as the lexicographically least of ±v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoBasis {
    pub long_root: Element,
    /// in descending lexicographic order
    pub short_roots: Vec<Element>,
}

impl OrthoBasis {
    pub fn members(&self) -> impl Iterator<Item = Element> + '_ {
        std::iter::once(self.long_root).chain(self.short_roots.iter().copied())
    }
}

fn span_size(m: &QuadraticModule, vs: &[Element]) -> usize {
    let mut span: BTreeSet<Element> = BTreeSet::from([m.zero()]);
    for &v in vs {
        let current: Vec<Element> = span.iter().copied().collect();
        for x in current {
            for k in 1..3 {
                span.insert(m.add(x, m.mul(k, v)));
            }
        }
    }
    span.len()
}

/// One basis per sign class of long elements; each completion by short
/// elements must be unique up to signs.
pub fn orthogonal_bases(m: &QuadraticModule) -> Result<Vec<OrthoBasis>, FqmError> {
    if !m.is_ternary() {
        return Err(FqmError::NotTernary);
    }
    let classes: Vec<(Element, TypeClass)> =
        m.elements().filter_map(|e| m.type_class(e).map(|t| (e, t))).filter(|&(e, _)| m.sign_canonical(e) == e).collect();
    let longs: Vec<Element> = classes.iter().filter(|c| c.1 == TypeClass::Long).map(|c| c.0).collect();
    let shorts: Vec<Element> = classes.iter().filter(|c| c.1 == TypeClass::Short).map(|c| c.0).collect();
    let need = m.rank().saturating_sub(1);

    let mut bases = Vec::with_capacity(longs.len());
    for &anchor in &longs {
        let perp: Vec<Element> = shorts.iter().copied().filter(|&s| m.b_scaled(s, anchor) == 0).collect();
        let mut completions: Vec<Vec<Element>> = Vec::new();
        let mut pick = Vec::new();
        complete(m, &perp, 0, need, &mut pick, &mut completions);
        completions.retain(|c| {
            let mut all = c.clone();
            all.push(anchor);
            span_size(m, &all) == m.size()
        });
        match completions.len() {
            0 => return Err(FqmError::NoCompletion { anchor: m.label(anchor) }),
            1 => {
                let mut short_roots = completions.pop().expect("one completion");
                short_roots.sort_by(|a, b| b.cmp(a));
                bases.push(OrthoBasis { long_root: anchor, short_roots });
            }
            count => return Err(FqmError::NonUniqueCompletion { anchor: m.label(anchor), count }),
        }
    }
    Ok(bases)
}

fn complete(
    m: &QuadraticModule,
    pool: &[Element],
    start: usize,
    need: usize,
    pick: &mut Vec<Element>,
    out: &mut Vec<Vec<Element>>,
) {
    if pick.len() == need {
        out.push(pick.clone());
        return;
    }
    for i in start..pool.len() {
        let s = pool[i];
        if pick.iter().all(|&p| m.b_scaled(p, s) == 0) {
            pick.push(s);
            complete(m, pool, i + 1, need, pick, out);
            pick.pop();
        }
    }
}

/// Every nonzero isotropic element pairs to zero with some basis member.
pub fn isotropic_incidence(m: &QuadraticModule, basis: &OrthoBasis) -> bool {
    m.elements()
        .filter(|&e| m.type_class(e) == Some(TypeClass::Isotropic))
        .all(|x| basis.members().any(|a| m.b_scaled(x, a) == 0))
}
