//! Boolean circuits over vertex sets.
//!
//! A circuit maps a set of vertices to a truth value; it is used both for
//! Muller objectives (evaluated on the set of vertices visited infinitely
//! often) and for weak objectives (evaluated on the set of vertices visited
//! at least once).

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// One gate of a circuit. Operands refer to earlier gates only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    /// True iff the vertex is in the evaluated set.
    Input(usize),
    Const(bool),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
}

/// A Boolean circuit over vertex sets, stored in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    /// Size of the vertex universe inputs may refer to.
    pub n_inputs: usize,
    gates: Vec<Gate>,
    output: u32,
}

impl Circuit {
    /// Circuit computing a constant.
    pub fn constant(n_inputs: usize, value: bool) -> Self {
        Circuit { n_inputs, gates: vec![Gate::Const(value)], output: 0 }
    }

    /// Circuit computing membership of a single vertex.
    pub fn input(n_inputs: usize, v: usize) -> Self {
        assert!(v < n_inputs);
        Circuit { n_inputs, gates: vec![Gate::Input(v)], output: 0 }
    }

    /// Disjunction over a vertex set ("the set is hit").
    pub fn or_of_set(n_inputs: usize, set: &BitSet) -> Self {
        let mut c = Circuit::constant(n_inputs, false);
        let mut acc: Option<u32> = None;
        for v in set.iter() {
            let g = c.push(Gate::Input(v));
            acc = Some(match acc {
                None => g,
                Some(a) => c.push(Gate::Or(a, g)),
            });
        }
        if let Some(a) = acc {
            c.output = a;
        }
        c
    }

    /// Conjunction over a vertex set ("the whole set is contained").
    pub fn and_of_set(n_inputs: usize, set: &BitSet) -> Self {
        let mut c = Circuit::constant(n_inputs, true);
        let mut acc: Option<u32> = None;
        for v in set.iter() {
            let g = c.push(Gate::Input(v));
            acc = Some(match acc {
                None => g,
                Some(a) => c.push(Gate::And(a, g)),
            });
        }
        if let Some(a) = acc {
            c.output = a;
        }
        c
    }

    /// Negation of this circuit.
    pub fn negate(&self) -> Self {
        let mut c = self.clone();
        c.output = c.push(Gate::Not(c.output));
        c
    }

    /// Conjunction of two circuits over the same universe.
    pub fn and(&self, other: &Circuit) -> Self {
        assert_eq!(self.n_inputs, other.n_inputs);
        let mut c = self.clone();
        let shift = c.gates.len() as u32;
        for g in &other.gates {
            c.gates.push(shift_gate(*g, shift));
        }
        let b = other.output + shift;
        let a = c.output;
        c.output = c.push(Gate::And(a, b));
        c
    }

    /// Disjunction of two circuits over the same universe.
    pub fn or(&self, other: &Circuit) -> Self {
        assert_eq!(self.n_inputs, other.n_inputs);
        let mut c = self.clone();
        let shift = c.gates.len() as u32;
        for g in &other.gates {
            c.gates.push(shift_gate(*g, shift));
        }
        let b = other.output + shift;
        let a = c.output;
        c.output = c.push(Gate::Or(a, b));
        c
    }

    fn push(&mut self, g: Gate) -> u32 {
        match g {
            Gate::Not(a) => assert!((a as usize) < self.gates.len()),
            Gate::And(a, b) | Gate::Or(a, b) => {
                assert!((a as usize) < self.gates.len() && (b as usize) < self.gates.len())
            }
            _ => {}
        }
        self.gates.push(g);
        (self.gates.len() - 1) as u32
    }

    /// Evaluate on a vertex set.
    pub fn eval(&self, set: &BitSet) -> bool {
        let mut vals = vec![false; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            vals[i] = match *g {
                Gate::Input(v) => set.contains(v),
                Gate::Const(b) => b,
                Gate::Not(a) => !vals[a as usize],
                Gate::And(a, b) => vals[a as usize] && vals[b as usize],
                Gate::Or(a, b) => vals[a as usize] || vals[b as usize],
            };
        }
        vals[self.output as usize]
    }

    /// If the circuit is syntactically a conjunction of "some vertex of the
    /// set is present" checks, return those sets. A `false` anywhere in the
    /// conjunction yields a single empty set (an unsatisfiable check);
    /// `true` conjuncts disappear; an overall `true` yields an empty list.
    /// Negations and non-disjunctive structure return `None`.
    pub fn conjunctive_hit_sets(&self) -> Option<Vec<BitSet>> {
        // Bottom-up: which gates compute a plain disjunction of inputs?
        let mut hit: Vec<Option<BitSet>> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            hit.push(match *g {
                Gate::Input(v) => Some(BitSet::from_indices(self.n_inputs, &[v])),
                Gate::Const(false) => Some(BitSet::new(self.n_inputs)),
                Gate::Const(true) => None,
                Gate::Or(a, b) => match (&hit[a as usize], &hit[b as usize]) {
                    (Some(x), Some(y)) => Some(x.union(y)),
                    _ => None,
                },
                Gate::Not(_) | Gate::And(_, _) => None,
            });
        }
        // Top-down over the output's conjunction tree.
        let mut sets = Vec::new();
        let mut stack = vec![self.output as usize];
        while let Some(i) = stack.pop() {
            match self.gates[i] {
                Gate::And(a, b) => {
                    stack.push(a as usize);
                    stack.push(b as usize);
                }
                Gate::Const(true) => {}
                Gate::Const(false) => return Some(vec![BitSet::new(self.n_inputs)]),
                _ => match &hit[i] {
                    Some(s) if s.is_empty() => return Some(vec![BitSet::new(self.n_inputs)]),
                    Some(s) => sets.push(s.clone()),
                    None => return None,
                },
            }
        }
        Some(sets)
    }

    /// Vertices the output actually depends on (syntactically reachable
    /// inputs from the output gate).
    pub fn inputs(&self) -> BitSet {
        let mut seen = vec![false; self.gates.len()];
        let mut stack = vec![self.output as usize];
        let mut set = BitSet::new(self.n_inputs);
        while let Some(i) = stack.pop() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            match self.gates[i] {
                Gate::Input(v) => set.insert(v),
                Gate::Const(_) => {}
                Gate::Not(a) => stack.push(a as usize),
                Gate::And(a, b) | Gate::Or(a, b) => {
                    stack.push(a as usize);
                    stack.push(b as usize);
                }
            }
        }
        set
    }

    /// Parse a postfix token stream. Tokens are vertex names (resolved by
    /// `resolve`), `TRUE`, `FALSE`, `NOT`, and the binary `AND` / `OR`.
    pub fn parse_postfix(
        tokens: &[&str],
        n_inputs: usize,
        resolve: impl Fn(&str) -> Option<usize>,
    ) -> Result<Circuit> {
        let mut c = Circuit { n_inputs, gates: Vec::new(), output: 0 };
        let mut stack: Vec<u32> = Vec::new();
        for &tok in tokens {
            let g = match tok {
                "TRUE" => c.push(Gate::Const(true)),
                "FALSE" => c.push(Gate::Const(false)),
                "NOT" => {
                    let a = stack
                        .pop()
                        .ok_or_else(|| Error::Parse("NOT needs one operand".into()))?;
                    c.push(Gate::Not(a))
                }
                "AND" | "OR" => {
                    let b = stack
                        .pop()
                        .ok_or_else(|| Error::Parse(format!("{tok} needs two operands")))?;
                    let a = stack
                        .pop()
                        .ok_or_else(|| Error::Parse(format!("{tok} needs two operands")))?;
                    c.push(if tok == "AND" { Gate::And(a, b) } else { Gate::Or(a, b) })
                }
                name => {
                    let v = resolve(name)
                        .ok_or_else(|| Error::Parse(format!("unknown vertex `{name}`")))?;
                    c.push(Gate::Input(v))
                }
            };
            stack.push(g);
        }
        match (stack.len(), stack.pop()) {
            (1, Some(out)) => {
                c.output = out;
                Ok(c)
            }
            (0, _) => Err(Error::Parse("empty circuit".into())),
            (n, _) => Err(Error::Parse(format!("{n} values left on circuit stack"))),
        }
    }

    /// Serialize to postfix with the given vertex names.
    pub fn to_postfix(&self, name: impl Fn(usize) -> String) -> String {
        let mut out: Vec<String> = vec![String::new(); self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            out[i] = match *g {
                Gate::Input(v) => name(v),
                Gate::Const(true) => "TRUE".into(),
                Gate::Const(false) => "FALSE".into(),
                Gate::Not(a) => format!("{} NOT", out[a as usize]),
                Gate::And(a, b) => format!("{} {} AND", out[a as usize], out[b as usize]),
                Gate::Or(a, b) => format!("{} {} OR", out[a as usize], out[b as usize]),
            };
        }
        out[self.output as usize].clone()
    }

    fn nnf(&self) -> Option<Nnf> {
        // Cap the expansion so shared sub-circuits cannot blow up.
        let mut budget = 1 << 14;
        self.nnf_rec(self.output as usize, true, &mut budget)
    }

    fn nnf_rec(&self, gate: usize, pol: bool, budget: &mut usize) -> Option<Nnf> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        Some(match self.gates[gate] {
            Gate::Input(v) => Nnf::Lit(v, pol),
            Gate::Const(b) => Nnf::Const(b == pol),
            Gate::Not(a) => self.nnf_rec(a as usize, !pol, budget)?,
            Gate::And(a, b) | Gate::Or(a, b) => {
                let is_and = matches!(self.gates[gate], Gate::And(..)) == pol;
                let l = self.nnf_rec(a as usize, pol, budget)?;
                let r = self.nnf_rec(b as usize, pol, budget)?;
                let mut kids = Vec::new();
                for k in [l, r] {
                    match k {
                        Nnf::And(gs) if is_and => kids.extend(gs),
                        Nnf::Or(gs) if !is_and => kids.extend(gs),
                        other => kids.push(other),
                    }
                }
                if is_and {
                    Nnf::And(kids)
                } else {
                    Nnf::Or(kids)
                }
            }
        })
    }

    /// Recognize a conjunction of disjunctions of (positive) vertex inputs
    /// and return the disjunct sets. `TRUE` yields an empty list.
    pub fn conj_of_disj(&self) -> Option<Vec<BitSet>> {
        fn disjunct(n: &Nnf, universe: usize) -> Option<BitSet> {
            match n {
                Nnf::Lit(v, true) => Some(BitSet::from_indices(universe, &[*v])),
                Nnf::Or(kids) => {
                    let mut s = BitSet::new(universe);
                    for k in kids {
                        match k {
                            Nnf::Lit(v, true) => s.insert(*v),
                            _ => return None,
                        }
                    }
                    Some(s)
                }
                _ => None,
            }
        }
        let nnf = self.nnf()?;
        match &nnf {
            Nnf::Const(true) => Some(vec![]),
            Nnf::And(kids) => kids.iter().map(|k| disjunct(k, self.n_inputs)).collect(),
            other => disjunct(other, self.n_inputs).map(|s| vec![s]),
        }
    }

    /// Recognize a pure disjunction of vertex inputs. `FALSE` yields the
    /// empty set.
    pub fn as_disjunction(&self) -> Option<BitSet> {
        match self.nnf()? {
            Nnf::Const(false) => Some(BitSet::new(self.n_inputs)),
            Nnf::Lit(v, true) => Some(BitSet::from_indices(self.n_inputs, &[v])),
            Nnf::Or(kids) => {
                let mut s = BitSet::new(self.n_inputs);
                for k in kids {
                    match k {
                        Nnf::Lit(v, true) => s.insert(v),
                        _ => return None,
                    }
                }
                Some(s)
            }
            _ => None,
        }
    }

    /// Recognize a pure conjunction of vertex inputs. `TRUE` yields the
    /// empty set.
    pub fn as_conjunction(&self) -> Option<BitSet> {
        match self.nnf()? {
            Nnf::Const(true) => Some(BitSet::new(self.n_inputs)),
            Nnf::Lit(v, true) => Some(BitSet::from_indices(self.n_inputs, &[v])),
            Nnf::And(kids) => {
                let mut s = BitSet::new(self.n_inputs);
                for k in kids {
                    match k {
                        Nnf::Lit(v, true) => s.insert(v),
                        _ => return None,
                    }
                }
                Some(s)
            }
            _ => None,
        }
    }

    /// Partition the vertex universe into classes of interchangeable inputs:
    /// the circuit's value on a set depends only on which classes the set
    /// intersects. Returns one class id per vertex; all vertices the output
    /// does not depend on share one class.
    ///
    /// Small supports are probed semantically (coarsest sound merge); larger
    /// ones fall back to a syntactic swap test on the negation normal form,
    /// and in the worst case every referenced input is its own class.
    pub fn interchange_classes(&self) -> Vec<usize> {
        let referenced = self.inputs();
        let refs: Vec<usize> = referenced.iter().collect();
        let mut class = vec![usize::MAX; self.n_inputs];

        let merged: Vec<Vec<usize>> = if refs.len() <= 12 {
            self.probe_classes(&refs)
        } else if let Some(groups) = self.syntactic_classes(&refs) {
            groups
        } else {
            refs.iter().map(|&v| vec![v]).collect()
        };

        let mut next = 0;
        for group in &merged {
            for &v in group {
                class[v] = next;
            }
            next += 1;
        }
        // One shared class for unreferenced vertices.
        let unref_class = next;
        for c in class.iter_mut() {
            if *c == usize::MAX {
                *c = unref_class;
            }
        }
        class
    }

    /// Exhaustive interchangeability probe: u and v merge iff for every
    /// T ⊆ refs∖{u,v}, eval(T∪{u}) = eval(T∪{v}) = eval(T∪{u,v}). The
    /// three-way check makes the circuit's value depend only on class
    /// presence, never on how many members of a class are in the set.
    fn probe_classes(&self, refs: &[usize]) -> Vec<Vec<usize>> {
        let k = refs.len();
        let mut eval_mask = |mask: u32| {
            let mut s = BitSet::new(self.n_inputs);
            for (i, &v) in refs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s.insert(v);
                }
            }
            self.eval(&s)
        };
        // Precompute the full truth table (k ≤ 12 so at most 4096 entries).
        let table: Vec<bool> = (0u32..1 << k).map(&mut eval_mask).collect();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for a in 0..k {
            for b in a + 1..k {
                if find(&mut parent, a) == find(&mut parent, b) {
                    continue;
                }
                let free: Vec<usize> = (0..k).filter(|&i| i != a && i != b).collect();
                let mut ok = true;
                'outer: for sub in 0u32..1 << free.len() {
                    let mut t = 0u32;
                    for (j, &i) in free.iter().enumerate() {
                        if sub & (1 << j) != 0 {
                            t |= 1 << i;
                        }
                    }
                    let fa = table[(t | 1 << a) as usize];
                    let fb = table[(t | 1 << b) as usize];
                    let fab = table[(t | 1 << a | 1 << b) as usize];
                    if fa != fb || fb != fab {
                        ok = false;
                        break 'outer;
                    }
                }
                if ok {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &v) in refs.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Syntactic interchangeability: u and v merge iff transposing them
    /// leaves the (sorted) negation normal form unchanged.
    fn syntactic_classes(&self, refs: &[usize]) -> Option<Vec<Vec<usize>>> {
        let nnf = self.nnf()?;
        let canon = |swap: Option<(usize, usize)>| -> String {
            fn go(n: &Nnf, swap: Option<(usize, usize)>, out: &mut String) {
                match n {
                    Nnf::Const(b) => out.push_str(if *b { "T" } else { "F" }),
                    Nnf::Lit(v, p) => {
                        let v = match swap {
                            Some((a, b)) if *v == a => b,
                            Some((a, b)) if *v == b => a,
                            _ => *v,
                        };
                        out.push(if *p { 'l' } else { 'n' });
                        out.push_str(&v.to_string());
                    }
                    Nnf::And(kids) | Nnf::Or(kids) => {
                        out.push(if matches!(n, Nnf::And(_)) { '&' } else { '|' });
                        let mut parts: Vec<String> = kids
                            .iter()
                            .map(|k| {
                                let mut s = String::new();
                                go(k, swap, &mut s);
                                s
                            })
                            .collect();
                        parts.sort();
                        out.push('(');
                        out.push_str(&parts.join(","));
                        out.push(')');
                    }
                }
            }
            let mut s = String::new();
            go(&nnf, swap, &mut s);
            s
        };
        let base = canon(None);
        let mut parent: Vec<usize> = (0..refs.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for a in 0..refs.len() {
            for b in a + 1..refs.len() {
                if find(&mut parent, a) != find(&mut parent, b)
                    && canon(Some((refs[a], refs[b]))) == base
                {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..refs.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(refs[i]);
        }
        Some(groups.into_values().collect())
    }
}

fn shift_gate(g: Gate, shift: u32) -> Gate {
    match g {
        Gate::Not(a) => Gate::Not(a + shift),
        Gate::And(a, b) => Gate::And(a + shift, b + shift),
        Gate::Or(a, b) => Gate::Or(a + shift, b + shift),
        other => other,
    }
}

/// Negation normal form as a tree (NOTs pushed onto inputs, same-op levels
/// flattened).
enum Nnf {
    Const(bool),
    Lit(usize, bool),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, ix: &[usize]) -> BitSet {
        BitSet::from_indices(n, ix)
    }

    #[test]
    fn parse_eval_roundtrip() {
        let names = ["a", "b", "c"];
        let resolve = |s: &str| names.iter().position(|&n| n == s);
        let c = Circuit::parse_postfix(&["a", "b", "OR", "c", "NOT", "AND"], 3, resolve).unwrap();
        assert!(c.eval(&set(3, &[0])));
        assert!(c.eval(&set(3, &[1])));
        assert!(!c.eval(&set(3, &[0, 2])));
        assert!(!c.eval(&set(3, &[])));
        let text = c.to_postfix(|v| names[v].to_string());
        let c2 = Circuit::parse_postfix(
            &text.split_whitespace().collect::<Vec<_>>(),
            3,
            resolve,
        )
        .unwrap();
        for mask in 0..8usize {
            let s = set(3, &(0..3).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>());
            assert_eq!(c.eval(&s), c2.eval(&s));
        }
    }

    #[test]
    fn parse_errors() {
        let resolve = |_: &str| None::<usize>;
        assert!(Circuit::parse_postfix(&["AND"], 0, resolve).is_err());
        assert!(Circuit::parse_postfix(&["TRUE", "TRUE"], 0, resolve).is_err());
        assert!(Circuit::parse_postfix(&["zzz"], 0, resolve).is_err());
        assert!(Circuit::parse_postfix(&[], 0, resolve).is_err());
    }

    #[test]
    fn builders_and_shapes() {
        let s01 = set(4, &[0, 1]);
        let s23 = set(4, &[2, 3]);
        let gen_buchi = Circuit::or_of_set(4, &s01).and(&Circuit::or_of_set(4, &s23));
        assert_eq!(gen_buchi.conj_of_disj(), Some(vec![s01.clone(), s23.clone()]));
        assert!(gen_buchi.eval(&set(4, &[1, 2])));
        assert!(!gen_buchi.eval(&set(4, &[0, 1])));

        let safety = Circuit::or_of_set(4, &s23).negate();
        assert!(safety.eval(&set(4, &[0])));
        assert!(!safety.eval(&set(4, &[0, 3])));
        assert_eq!(safety.conj_of_disj(), None);
        assert_eq!(Circuit::or_of_set(4, &s01).as_disjunction(), Some(s01.clone()));
        assert_eq!(Circuit::and_of_set(4, &s23).as_conjunction(), Some(s23.clone()));
        assert_eq!(Circuit::constant(4, true).conj_of_disj(), Some(vec![]));
    }

    #[test]
    fn inputs_reachability() {
        // Build (a OR b) but keep an unused input gate for c.
        let mut c = Circuit::or_of_set(3, &set(3, &[0, 1]));
        c.push(Gate::Input(2));
        assert_eq!(c.inputs().iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn interchange_or_merges_and_conjunction_splits() {
        // a OR b: both inputs interchangeable.
        let c = Circuit::or_of_set(3, &set(3, &[0, 1]));
        let cls = c.interchange_classes();
        assert_eq!(cls[0], cls[1]);
        assert_ne!(cls[0], cls[2]);

        // a AND b: the value depends on both being present, so the inputs
        // must not merge (set-presence semantics would report a false
        // positive otherwise).
        let c = Circuit::and_of_set(3, &set(3, &[0, 1]));
        let cls = c.interchange_classes();
        assert_ne!(cls[0], cls[1]);
    }

    #[test]
    fn interchange_large_support_uses_syntax() {
        // NOT(OR(big set)): all 20 members interchangeable syntactically.
        let big = set(25, &(0..20).collect::<Vec<_>>());
        let c = Circuit::or_of_set(25, &big).negate();
        let cls = c.interchange_classes();
        for v in 1..20 {
            assert_eq!(cls[0], cls[v]);
        }
        assert_ne!(cls[0], cls[24]);
    }

    #[test]
    fn interchange_classes_are_presence_sound() {
        // (a OR b) AND (c OR d): {a,b} and {c,d} merge; evaluation on the
        // union of present classes must match evaluation on any witness set.
        let c = Circuit::or_of_set(4, &set(4, &[0, 1])).and(&Circuit::or_of_set(4, &set(4, &[2, 3])));
        let cls = c.interchange_classes();
        assert_eq!(cls[0], cls[1]);
        assert_eq!(cls[2], cls[3]);
        assert_ne!(cls[0], cls[2]);
        assert_eq!(c.eval(&set(4, &[0, 2])), c.eval(&set(4, &[1, 3])));
    }
}
