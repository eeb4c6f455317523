//! Discrete invariance group of the equation in `(x_p, y_p, x_m, y_m)`.
//!
//! Every generator permutes, up to sign, the sixteen linear forms
//! `x_p, y_p, x_m, y_m, (x_p +- y_p)/sqrt2, (x_m +- y_m)/sqrt2` and their
//! opposites, so elements are stored as permutations of those symbols.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Surd2;
use crate::hamiltonian::QPoint;
use crate::Error;

/// Number of signed symbols.
pub const SYMBOLS: usize = 16;
/// Closure is abandoned past this order.
pub const ORDER_LIMIT: usize = 4096;

/// `(a + b sqrt2) / 2` with small integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Half2 {
    a: i32,
    b: i32,
}

impl Half2 {
    const ZERO: Self = Self { a: 0, b: 0 };
    const ONE: Self = Self { a: 2, b: 0 };
    const INV_SQRT2: Self = Self { a: 0, b: 1 };

    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }

    fn to_f64(self) -> f64 {
        (self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2) / 2.0
    }

    fn to_surd(self) -> Surd2 {
        Surd2::new(crate::exact::ratio(self.a as i64, 2), crate::exact::ratio(self.b as i64, 2))
    }
}

type Form = [Half2; 4];

fn symbol_form(k: usize) -> Form {
    let z = Half2::ZERO;
    let (o, r) = (Half2::ONE, Half2::INV_SQRT2);
    let base = match k % 8 {
        0 => [o, z, z, z],
        1 => [z, o, z, z],
        2 => [z, z, o, z],
        3 => [z, z, z, o],
        4 => [r, r, z, z],
        5 => [r, r.neg(), z, z],
        6 => [z, z, r, r],
        _ => [z, z, r, r.neg()],
    };
    if k >= 8 {
        base.map(Half2::neg)
    } else {
        base
    }
}

fn symbol_of(form: &Form) -> Option<usize> {
    (0..SYMBOLS).find(|&k| symbol_form(k) == *form)
}

/// Row vector times the matrix whose rows are `rows`.
fn form_times(form: &Form, rows: &[Form; 4]) -> Option<Form> {
    let mut acc = [(0i32, 0i32); 4];
    for (i, c) in form.iter().enumerate() {
        for (j, slot) in acc.iter_mut().enumerate() {
            let d = rows[i][j];
            slot.0 += c.a * d.a + 2 * c.b * d.b;
            slot.1 += c.a * d.b + c.b * d.a;
        }
    }
    let mut out = [Half2::ZERO; 4];
    for (o, (a, b)) in out.iter_mut().zip(acc) {
        if a % 2 != 0 || b % 2 != 0 {
            return None;
        }
        *o = Half2 { a: a / 2, b: b / 2 };
    }
    Some(out)
}

/// The named generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    PiX,
    PiY,
    P12,
    Pi1,
    Pi2,
    PiP,
    PiM,
}

impl Generator {
    pub const ALL: [Generator; 7] = [Self::PiX, Self::PiY, Self::P12, Self::Pi1, Self::Pi2, Self::PiP, Self::PiM];
    pub const PHYSICAL: [Generator; 3] = [Self::PiX, Self::PiY, Self::P12];
    /// Sign changes introduced by the double coverings.
    pub const ADDITIONAL: [Generator; 4] = [Self::Pi1, Self::Pi2, Self::PiP, Self::PiM];

    pub fn name(self) -> &'static str {
        match self {
            Self::PiX => "PiX",
            Self::PiY => "PiY",
            Self::P12 => "P12",
            Self::Pi1 => "Pi1",
            Self::Pi2 => "Pi2",
            Self::PiP => "PiP",
            Self::PiM => "PiM",
        }
    }

    /// Images of `x_p, y_p, x_m, y_m` as symbol indices.
    fn images(self) -> [usize; 4] {
        match self {
            Self::PiX => [0, 9, 2, 11],
            Self::PiY => [4, 5, 6, 7],
            Self::P12 => [0, 1, 3, 10],
            Self::Pi1 => [11, 2, 9, 0],
            Self::Pi2 => [2, 3, 0, 1],
            Self::PiP => [8, 9, 2, 3],
            Self::PiM => [0, 1, 10, 11],
        }
    }

    pub fn element(self) -> GroupElement {
        GroupElement::from_images(self.images()).expect("generator tables are consistent")
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown generator {s}")))
    }
}

/// Linear substitution `q_i -> sum_j g_ij q_j`, stored through the induced
/// permutation of the sixteen signed symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    perm: [u8; SYMBOLS],
}

impl GroupElement {
    pub fn identity() -> Self {
        let mut perm = [0u8; SYMBOLS];
        for (k, p) in perm.iter_mut().enumerate() {
            *p = k as u8;
        }
        Self { perm }
    }

    /// Builds the element sending coordinate `i` to symbol `images[i]`.
    pub fn from_images(images: [usize; 4]) -> Result<Self, Error> {
        if images.iter().any(|&k| k >= SYMBOLS) {
            return Err(Error::GroupCheck("symbol index out of range".into()));
        }
        let rows = images.map(symbol_form);
        let mut perm = [0u8; SYMBOLS];
        for (k, p) in perm.iter_mut().enumerate() {
            let img = form_times(&symbol_form(k), &rows)
                .and_then(|f| symbol_of(&f))
                .ok_or_else(|| Error::GroupCheck(format!("symbol {k} leaves the symbol set")))?;
            *p = img as u8;
        }
        let g = Self { perm };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<(), Error> {
        let mut seen = [false; SYMBOLS];
        for (k, &p) in self.perm.iter().enumerate() {
            if seen[p as usize] {
                return Err(Error::GroupCheck("not a bijection".into()));
            }
            seen[p as usize] = true;
            if self.perm[(k + 8) % SYMBOLS] as usize != (p as usize + 8) % SYMBOLS {
                return Err(Error::GroupCheck("sign inconsistent".into()));
            }
        }
        Ok(())
    }

    pub fn permutation(&self) -> [u8; SYMBOLS] {
        self.perm
    }

    /// Product acting as `self` after `other`: `(g h) q = g (h q)`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut perm = [0u8; SYMBOLS];
        for (k, p) in perm.iter_mut().enumerate() {
            *p = other.perm[self.perm[k] as usize];
        }
        Self { perm }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = [0u8; SYMBOLS];
        for (k, &p) in self.perm.iter().enumerate() {
            perm[p as usize] = k as u8;
        }
        Self { perm }
    }

    pub fn order(&self) -> usize {
        let id = Self::identity();
        let mut g = *self;
        let mut n = 1;
        while g != id {
            g = g.compose(self);
            n += 1;
        }
        n
    }

    fn rows(&self) -> [Form; 4] {
        [0, 1, 2, 3].map(|i| symbol_form(self.perm[i] as usize))
    }

    /// Exact coordinate matrix.
    pub fn matrix(&self) -> [[Surd2; 4]; 4] {
        self.rows().map(|r| r.map(Half2::to_surd))
    }

    pub fn apply(&self, q: QPoint) -> QPoint {
        let v = q.to_array();
        let r = self.rows();
        let c = |i: usize| (0..4).map(|j| r[i][j].to_f64() * v[j]).sum::<f64>();
        QPoint::new(c(0), c(1), c(2), c(3))
    }
}

/// Image of `q` under `g`.
pub fn apply_symmetry(g: &GroupElement, q: QPoint) -> QPoint {
    g.apply(q)
}

/// Product of a word read as successive substitutions, leftmost first.
pub fn word(gens: &[Generator]) -> GroupElement {
    gens.iter().fold(GroupElement::identity(), |acc, g| g.element().compose(&acc))
}

#[derive(Clone, Debug)]
pub struct Group {
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
    table: Vec<Vec<u16>>,
}

/// Breadth-first closure; the identity comes first.
pub fn generate_group(generators: &[GroupElement]) -> Result<Group, Error> {
    let id = GroupElement::identity();
    let mut elements = vec![id];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.compose(g);
            if !index.contains_key(&y) {
                if elements.len() >= ORDER_LIMIT {
                    return Err(Error::GroupCheck(format!("closure exceeds {ORDER_LIMIT} elements")));
                }
                index.insert(y, elements.len());
                elements.push(y);
                queue.push_back(y);
            }
        }
    }
    let table = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.compose(b)] as u16).collect())
        .collect();
    Ok(Group { elements, index, table })
}

/// The full group from all seven generators.
pub fn standard_group() -> Result<Group, Error> {
    generate_group(&Generator::ALL.map(Generator::element))
}

impl Group {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn product(&self, a: usize, b: usize) -> usize {
        self.table[a][b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.index[&self.elements[a].inverse()]
    }

    pub fn contains_subgroup(&self, other: &Group) -> bool {
        other.elements.iter().all(|g| self.index.contains_key(g))
    }

    /// Conjugacy classes in order of first appearance.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut owner = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if owner[x] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..n).map(|g| self.product(self.product(g, x), self.inverse(g))).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                owner[m] = classes.len();
            }
            classes.push(members);
        }
        classes
    }

    /// Smallest normal subgroup containing `gens`.
    pub fn normal_closure(&self, gens: &[GroupElement]) -> Result<Group, Error> {
        let mut conj = Vec::new();
        for g in &self.elements {
            for a in gens {
                conj.push(g.compose(a).compose(&g.inverse()));
            }
        }
        conj.sort();
        conj.dedup();
        generate_group(&conj)
    }
}

/// Conjugacy classes with their multiplication constants.
#[derive(Clone, Debug)]
pub struct ClassData {
    pub classes: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
    owner: Vec<usize>,
}

impl ClassData {
    pub fn new(group: &Group) -> Self {
        Self::from_classes(group, group.conjugacy_classes())
    }

    fn from_classes(group: &Group, classes: Vec<Vec<usize>>) -> Self {
        let mut owner = vec![0; group.order()];
        for (c, members) in classes.iter().enumerate() {
            for &m in members {
                owner[m] = c;
            }
        }
        let sizes = classes.iter().map(Vec::len).collect();
        Self { classes, sizes, owner }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.owner[element]
    }

    /// Reorders classes so that `reps[i]` lies in class `i`.
    pub fn reorder(&self, group: &Group, reps: &[GroupElement]) -> Result<Self, Error> {
        let mut order = Vec::with_capacity(reps.len());
        for r in reps {
            let idx = group.index_of(r).ok_or_else(|| Error::GroupCheck("representative outside the group".into()))?;
            let c = self.class_of(idx);
            if order.contains(&c) {
                return Err(Error::GroupCheck("two representatives share a class".into()));
            }
            order.push(c);
        }
        if order.len() != self.len() {
            return Err(Error::GroupCheck(format!("{} representatives for {} classes", order.len(), self.len())));
        }
        Ok(Self::from_classes(group, order.iter().map(|&c| self.classes[c].clone()).collect()))
    }
}

/// `c[i][j][l]`: occurrences of class `l` in the product `K_i K_j`.
pub fn class_constants(group: &Group, data: &ClassData) -> Vec<Vec<Vec<u64>>> {
    let n = data.len();
    let mut c = vec![vec![vec![0u64; n]; n]; n];
    for (l, kl) in data.classes.iter().enumerate() {
        let z = kl[0];
        for (i, ki) in data.classes.iter().enumerate() {
            for &a in ki {
                let b = group.product(group.inverse(a), z);
                c[i][data.class_of(b)][l] += 1;
            }
        }
    }
    c
}

/// Element `a + b sqrt2` of `Z[sqrt2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootTwoInt {
    pub a: i64,
    pub b: i64,
}

impl RootTwoInt {
    pub const fn new(a: i64, b: i64) -> Self {
        Self { a, b }
    }

    pub const fn int(a: i64) -> Self {
        Self { a, b: 0 }
    }

    pub fn mul(self, o: Self) -> Self {
        Self { a: self.a * o.a + 2 * self.b * o.b, b: self.a * o.b + self.b * o.a }
    }

    pub fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b }
    }

    pub fn scale(self, k: i64) -> Self {
        Self { a: self.a * k, b: self.b * k }
    }

    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }

    pub fn to_surd(self) -> Surd2 {
        Surd2::from_ints(self.a, self.b)
    }
}

impl fmt::Display for RootTwoInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{}sqrt{}", if b < 0 { "-" } else { "" }, 2 * b * b),
            (a, b) => write!(f, "{a}{}{}sqrt2", if b < 0 { "-" } else { "+" }, b.abs()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub class_sizes: Vec<usize>,
    /// One row per irreducible representation, one column per class.
    pub rows: Vec<Vec<RootTwoInt>>,
    pub group_order: usize,
}

impl CharacterTable {
    pub fn dimensions(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r[0].a).collect()
    }

    /// Row and column orthogonality, checked exactly.
    pub fn check_orthogonality(&self) -> Result<(), Error> {
        let g = self.group_order as i64;
        for (r, x) in self.rows.iter().enumerate() {
            for (s, y) in self.rows.iter().enumerate() {
                let mut acc = RootTwoInt::int(0);
                for (k, size) in self.class_sizes.iter().enumerate() {
                    acc = acc.add(x[k].mul(y[k]).scale(*size as i64));
                }
                if acc != RootTwoInt::int(if r == s { g } else { 0 }) {
                    return Err(Error::GroupCheck(format!("rows {r} and {s} are not orthogonal")));
                }
            }
        }
        let n = self.class_sizes.len();
        for i in 0..n {
            for j in 0..n {
                let mut acc = RootTwoInt::int(0);
                for row in &self.rows {
                    acc = acc.add(row[i].mul(row[j]));
                }
                let want = if i == j { g / self.class_sizes[i] as i64 } else { 0 };
                if acc != RootTwoInt::int(want) {
                    return Err(Error::GroupCheck(format!("columns {i} and {j} are not orthogonal")));
                }
            }
        }
        Ok(())
    }

    /// `g_i g_j chi_i chi_j = chi_E sum_l c_ijl g_l chi_l` for every row.
    pub fn check_class_relations(&self, constants: &[Vec<Vec<u64>>]) -> Result<(), Error> {
        let n = self.class_sizes.len();
        let g: Vec<i64> = self.class_sizes.iter().map(|&s| s as i64).collect();
        for (r, row) in self.rows.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let lhs = row[i].mul(row[j]).scale(g[i] * g[j]);
                    let mut rhs = RootTwoInt::int(0);
                    for l in 0..n {
                        if constants[i][j][l] != 0 {
                            rhs = rhs.add(row[l].scale(constants[i][j][l] as i64 * g[l]));
                        }
                    }
                    if lhs != rhs.mul(row[0]) {
                        return Err(Error::GroupCheck(format!("row {r} violates the class relation at ({i}, {j})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let line = |cells: Vec<String>| cells.iter().map(|c| format!("{c:>7}")).collect::<Vec<_>>().join("");
        out.push_str(&line(self.class_sizes.iter().map(|s| s.to_string()).collect()));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row.iter().map(|x| x.to_string()).collect()));
            out.push('\n');
        }
        out
    }
}

/// Characters from the simultaneous eigenvectors of the class
/// multiplication matrices, snapped to `Z[sqrt2]` and checked exactly.
pub fn character_table(group: &Group, data: &ClassData) -> Result<CharacterTable, Error> {
    let constants = class_constants(group, data);
    let n = data.len();
    let order = group.order() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _attempt in 0..8 {
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(1..1000) as f64).collect();
        // (M_i)_{jl} = c_ijl has eigenvector omega_l = g_l chi_l / chi_E
        let m = Mat::<f64>::from_fn(n, n, |j, l| (0..n).map(|i| weights[i] * constants[i][j][l] as f64).sum());
        let Ok(evd) = m.eigen() else { continue };
        let u = evd.U();
        let mut rows = Vec::with_capacity(n);
        let mut ok = true;
        for col in 0..n {
            let v0 = u[(0, col)];
            if v0.norm() < 1e-12 {
                ok = false;
                break;
            }
            let omega: Vec<_> = (0..n).map(|l| u[(l, col)] / v0).collect();
            if omega.iter().any(|w| w.im.abs() > 1e-6) {
                return Err(Error::GroupCheck("complex characters are not supported".into()));
            }
            let norm: f64 = (0..n).map(|l| omega[l].re * omega[l].re / data.sizes[l] as f64).sum();
            let dim = (order / norm).sqrt();
            let bound = dim.round() as i64;
            let mut row = Vec::with_capacity(n);
            for l in 0..n {
                let chi = dim * omega[l].re / data.sizes[l] as f64;
                match snap(chi, bound) {
                    Some(x) => row.push(x),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            rows.push(row);
        }
        if !ok {
            continue;
        }
        rows.sort_by(|x, y| x[0].cmp(&y[0]).then_with(|| y.cmp(x)));
        let table = CharacterTable { class_sizes: data.sizes.clone(), rows, group_order: group.order() };
        if table.check_orthogonality().is_ok() && table.check_class_relations(&constants).is_ok() {
            return Ok(table);
        }
    }
    Err(Error::GroupCheck("could not separate the irreducible characters".into()))
}

fn snap(x: f64, bound: i64) -> Option<RootTwoInt> {
    let s = Surd2::snap_integer(x, bound.max(1), 1e-6)?;
    let a = s.rat.to_integer().try_into().ok()?;
    let b = s.sqrt2.to_integer().try_into().ok()?;
    s.rat.is_integer().then_some(())?;
    s.sqrt2.is_integer().then_some(())?;
    Some(RootTwoInt::new(a, b))
}

/// Representatives of the classes in the conventional order: the eight
/// classes of the planar point group first and the additional symmetries
/// last.
pub fn reference_representatives() -> Vec<Vec<Generator>> {
    use Generator::*;
    vec![
        vec![],
        vec![PiY],
        vec![PiX],
        vec![PiY, PiX],
        vec![P12],
        vec![PiY, P12],
        vec![PiX, P12],
        vec![PiY, PiX, P12],
        vec![PiP, PiM],
        vec![Pi2, PiX, PiM],
        vec![Pi2, P12],
        vec![Pi1, Pi2],
        vec![Pi2, PiX, P12],
        vec![PiP, PiY, PiX, P12],
        vec![PiP, P12],
        vec![Pi2, PiX],
        vec![Pi2, PiY],
        vec![Pi2, PiY, PiX],
        vec![Pi1, Pi2, PiM],
        vec![Pi2, PiY, PiM],
        vec![Pi2, PiY, PiX, P12],
        vec![Pi2, PiY, P12],
        vec![PiY, PiX, PiM],
        vec![PiP, PiY, PiX, PiM],
        vec![Pi1, PiY, PiX, P12],
        // the inverse of P12 is P12 P12 P12
        vec![PiY, PiX, P12, P12, P12],
        vec![Pi2],
        vec![Pi1],
        vec![PiP],
    ]
}

/// Group, classes in the reference order, and character table.
#[derive(Clone, Debug)]
pub struct SymmetryAnalysis {
    pub group: Group,
    pub classes: ClassData,
    pub table: CharacterTable,
}

impl SymmetryAnalysis {
    pub fn standard() -> Result<Self, Error> {
        let group = standard_group()?;
        let reps: Vec<GroupElement> = reference_representatives().iter().map(|w| word(w)).collect();
        let classes = ClassData::new(&group).reorder(&group, &reps)?;
        let table = character_table(&group, &classes)?;
        Ok(Self { group, classes, table })
    }

    pub fn class_of(&self, g: &GroupElement) -> Option<usize> {
        self.group.index_of(g).map(|i| self.classes.class_of(i))
    }

    /// One-dimensional rows trivial on every additional symmetry, with
    /// their `(PiX, PiY, P12)` characters.
    pub fn physical_representations(&self) -> Result<Vec<PhysicalRep>, Error> {
        let cols: Vec<usize> = Generator::ADDITIONAL
            .iter()
            .map(|g| self.class_of(&g.element()).expect("generator in group"))
            .collect();
        let col = |g: Generator| self.class_of(&g.element()).expect("generator in group");
        let (cx, cy, cp) = (col(Generator::PiX), col(Generator::PiY), col(Generator::P12));
        let reps: Vec<PhysicalRep> = self
            .table
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| cols.iter().all(|&c| row[c] == row[0]))
            .map(|(i, row)| PhysicalRep { row: i, dimension: row[0].a, pi_x: row[cx].a, pi_y: row[cy].a, p12: row[cp].a })
            .collect();
        if reps.len() != 8 {
            return Err(Error::GroupCheck(format!("{} physical representations, expected 8", reps.len())));
        }
        Ok(reps)
    }

    /// The physical rows restricted to the first eight classes form the
    /// character table of a group `Z2 x Z2 x Z2`.
    pub fn check_point_group_corner(&self) -> Result<(), Error> {
        let reps = self.physical_representations()?;
        let mut signatures = Vec::new();
        for r in &reps {
            let row = &self.table.rows[r.row];
            if r.dimension != 1 {
                return Err(Error::GroupCheck("physical representation of dimension above one".into()));
            }
            let (y, x, p) = (r.pi_y, r.pi_x, r.p12);
            let expect = [1, y, x, y * x, p, y * p, x * p, y * x * p];
            for (k, e) in expect.iter().enumerate() {
                if row[k] != RootTwoInt::int(*e) {
                    return Err(Error::GroupCheck(format!("corner entry ({}, {k}) is {}", r.row, row[k])));
                }
            }
            signatures.push((x, y, p));
        }
        signatures.sort();
        signatures.dedup();
        if signatures.len() != 8 {
            return Err(Error::GroupCheck("physical signatures are not distinct".into()));
        }
        Ok(())
    }

    /// Order of the image of the physical generators modulo the normal
    /// closure of the additional symmetries.
    pub fn physical_quotient_order(&self) -> Result<usize, Error> {
        let h = generate_group(&Generator::PHYSICAL.map(Generator::element))?;
        let n = self.group.normal_closure(&Generator::ADDITIONAL.map(Generator::element))?;
        let common = h.elements().iter().filter(|g| n.index_of(g).is_some()).count();
        Ok(h.order() / common)
    }

    /// Every check used by the verification report.
    pub fn verify(&self) -> Result<(), Error> {
        if self.group.order() != 128 {
            return Err(Error::GroupCheck(format!("group order {}", self.group.order())));
        }
        self.table.check_orthogonality()?;
        self.table.check_class_relations(&class_constants(&self.group, &self.classes))?;
        self.check_point_group_corner()?;
        if self.physical_quotient_order()? != 8 {
            return Err(Error::GroupCheck("physical generators do not act as an order-8 group".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhysicalRep {
    pub row: usize,
    pub dimension: i64,
    pub pi_x: i64,
    pub pi_y: i64,
    pub p12: i64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_act_as_defined() {
        let q = QPoint::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(Generator::PiP.element().apply(q), QPoint::new(-1.0, -2.0, 3.0, 4.0));
        assert_eq!(Generator::P12.element().apply(q), QPoint::new(1.0, 2.0, 4.0, -3.0));
        assert_eq!(GroupElement::identity().apply(q), q);
    }

    #[test]
    fn generator_orders() {
        assert_eq!(Generator::P12.element().order(), 4);
        assert_eq!(Generator::Pi1.element().order(), 4);
        for g in [Generator::PiX, Generator::PiY, Generator::Pi2, Generator::PiP, Generator::PiM] {
            assert_eq!(g.element().order(), 2, "{g}");
        }
    }

    #[test]
    fn involution_generates_order_two() {
        assert_eq!(generate_group(&[Generator::PiP.element()]).unwrap().order(), 2);
    }

    #[test]
    fn compose_matches_matrices() {
        let a = Generator::PiY.element();
        let b = Generator::P12.element();
        let q = QPoint::new(0.3, -1.1, 0.7, 2.0);
        let lhs = a.compose(&b).apply(q).to_array();
        let rhs = a.apply(b.apply(q)).to_array();
        for k in 0..4 {
            assert!((lhs[k] - rhs[k]).abs() < 1e-12);
        }
    }
}
