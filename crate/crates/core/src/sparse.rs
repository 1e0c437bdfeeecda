//! Compressed sparse form of a finite MDP and the graph algorithms shared by
//! the avoid-set computation, the qualitative precomputation and the
//! end-component analysis.
//!
//! Every algorithm takes a `targets` mask. Target states are treated as
//! absorbing whatever actions they carry.

use crate::model::FiniteMdp;

pub(crate) struct Sparse {
    pub n: usize,
    /// Choice range of state `s` is `state_start[s]..state_start[s + 1]`.
    pub state_start: Vec<u32>,
    /// Entry range of choice `c` is `choice_start[c]..choice_start[c + 1]`.
    pub choice_start: Vec<u32>,
    pub succ: Vec<u32>,
    pub prob: Vec<f64>,
    /// Owning state of each choice.
    pub owner: Vec<u32>,
}

/// Reverse adjacency: for each state, the choices having it in their support.
pub(crate) struct Reverse {
    start: Vec<u32>,
    choice: Vec<u32>,
}

impl Reverse {
    pub fn preds(&self, s: usize) -> &[u32] {
        &self.choice[self.start[s] as usize..self.start[s + 1] as usize]
    }
}

impl Sparse {
    pub fn from_finite(m: &FiniteMdp) -> Self {
        let n = m.num_states();
        let mut sp = Sparse {
            n,
            state_start: Vec::with_capacity(n + 1),
            choice_start: vec![0],
            succ: Vec::new(),
            prob: Vec::new(),
            owner: Vec::new(),
        };
        sp.state_start.push(0);
        for s in 0..n {
            for a in m.actions(s) {
                for (t, p) in a.dist.iter() {
                    sp.succ.push(*t as u32);
                    sp.prob.push(p.to_f64());
                }
                sp.choice_start.push(sp.succ.len() as u32);
                sp.owner.push(s as u32);
            }
            sp.state_start.push(sp.owner.len() as u32);
        }
        sp
    }

    pub fn num_choices(&self) -> usize {
        self.owner.len()
    }

    #[inline]
    pub fn choices(&self, s: usize) -> std::ops::Range<usize> {
        self.state_start[s] as usize..self.state_start[s + 1] as usize
    }

    #[inline]
    pub fn entries(&self, c: usize) -> std::ops::Range<usize> {
        self.choice_start[c] as usize..self.choice_start[c + 1] as usize
    }

    #[inline]
    pub fn support(&self, c: usize) -> &[u32] {
        &self.succ[self.entries(c)]
    }

    pub fn reverse(&self) -> Reverse {
        let mut count = vec![0u32; self.n + 1];
        for &t in &self.succ {
            count[t as usize + 1] += 1;
        }
        for i in 0..self.n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut choice = vec![0u32; self.succ.len()];
        for c in 0..self.num_choices() {
            for &t in self.support(c) {
                choice[fill[t as usize] as usize] = c as u32;
                fill[t as usize] += 1;
            }
        }
        Reverse { start: count, choice }
    }
}

/// States with a path to a target (under some choices).
pub(crate) fn can_reach(sp: &Sparse, rev: &Reverse, targets: &[bool]) -> Vec<bool> {
    let mut mark = targets.to_vec();
    let mut stack: Vec<usize> = (0..sp.n).filter(|&s| targets[s]).collect();
    while let Some(t) = stack.pop() {
        for &c in rev.preds(t) {
            let o = sp.owner[c as usize] as usize;
            if !mark[o] {
                mark[o] = true;
                stack.push(o);
            }
        }
    }
    mark
}

/// Greatest set of non-target states from which some scheduler surely
/// avoids the targets: dead ends, and states with a choice whose whole
/// support stays in the set.
pub(crate) fn sure_avoid(sp: &Sparse, rev: &Reverse, targets: &[bool]) -> Vec<bool> {
    let mut inside: Vec<bool> = targets.iter().map(|t| !t).collect();
    let mut outside_count = vec![0u32; sp.num_choices()];
    let mut safe = vec![0u32; sp.n];
    let mut queue = Vec::new();
    for s in 0..sp.n {
        if !inside[s] {
            continue;
        }
        for c in sp.choices(s) {
            let out = sp.support(c).iter().filter(|&&t| targets[t as usize]).count() as u32;
            outside_count[c] = out;
            if out == 0 {
                safe[s] += 1;
            }
        }
        if safe[s] == 0 && !sp.choices(s).is_empty() {
            inside[s] = false;
            queue.push(s);
        }
    }
    while let Some(s) = queue.pop() {
        for &c in rev.preds(s) {
            let c = c as usize;
            let o = sp.owner[c] as usize;
            if !inside[o] {
                continue;
            }
            outside_count[c] += 1;
            if outside_count[c] == 1 {
                safe[o] -= 1;
                if safe[o] == 0 {
                    inside[o] = false;
                    queue.push(o);
                }
            }
        }
    }
    inside
}

/// States from which some scheduler reaches a target almost surely.
pub(crate) fn almost_sure_max(sp: &Sparse, rev: &Reverse, targets: &[bool]) -> Vec<bool> {
    let mut u = vec![true; sp.n];
    loop {
        let choice_ok: Vec<bool> = (0..sp.num_choices())
            .map(|c| sp.support(c).iter().all(|&t| u[t as usize]))
            .collect();
        let mut r = targets.to_vec();
        let mut stack: Vec<usize> = (0..sp.n).filter(|&s| targets[s]).collect();
        while let Some(t) = stack.pop() {
            for &c in rev.preds(t) {
                let o = sp.owner[c as usize] as usize;
                if choice_ok[c as usize] && u[o] && !r[o] && !targets[o] {
                    r[o] = true;
                    stack.push(o);
                }
            }
        }
        if r == u {
            return u;
        }
        u = r;
    }
}

/// States from which every scheduler reaches a target almost surely: those
/// that cannot reach `avoid` (the sure-avoid set) without first hitting a
/// target.
pub(crate) fn almost_sure_min(sp: &Sparse, rev: &Reverse, targets: &[bool], avoid: &[bool]) -> Vec<bool> {
    let mut bad = avoid.to_vec();
    let mut stack: Vec<usize> = (0..sp.n).filter(|&s| avoid[s]).collect();
    while let Some(t) = stack.pop() {
        for &c in rev.preds(t) {
            let o = sp.owner[c as usize] as usize;
            if !bad[o] && !targets[o] {
                bad[o] = true;
                stack.push(o);
            }
        }
    }
    bad.iter().map(|b| !b).collect()
}

pub(crate) const NO_COMPONENT: u32 = u32::MAX;

/// Strongly connected components of the graph on `active` states using the
/// `allowed` choices. Returns the component id of each state
/// ([`NO_COMPONENT`] for inactive ones) and the number of components.
pub(crate) fn sccs(sp: &Sparse, active: &[bool], allowed: &[bool]) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let n = sp.n;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NO_COMPONENT; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut count = 0usize;
    // call frames: (state, next choice, next entry within that choice)
    let mut frames: Vec<(u32, usize, usize)> = Vec::new();

    for root in 0..n {
        if !active[root] || index[root] != UNSEEN {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        let first = sp.choices(root).start;
        frames.push((root as u32, first, first_entry(sp, first, root)));

        while let Some(frame) = frames.last_mut() {
            let v = frame.0 as usize;
            let choices_end = sp.choices(v).end;
            let mut descended = None;
            while frame.1 < choices_end {
                let c = frame.1;
                if !allowed[c] {
                    frame.1 += 1;
                    frame.2 = first_entry(sp, frame.1, v);
                    continue;
                }
                let entries = sp.entries(c);
                if frame.2 >= entries.end {
                    frame.1 += 1;
                    frame.2 = first_entry(sp, frame.1, v);
                    continue;
                }
                let w = sp.succ[frame.2] as usize;
                frame.2 += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == UNSEEN {
                    descended = Some(w);
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if let Some(w) = descended {
                index[w] = next_index;
                low[w] = next_index;
                next_index += 1;
                stack.push(w as u32);
                on_stack[w] = true;
                let first = sp.choices(w).start;
                frames.push((w as u32, first, first_entry(sp, first, w)));
                continue;
            }
            frames.pop();
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack") as usize;
                    on_stack[w] = false;
                    comp[w] = count as u32;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
            if let Some(parent) = frames.last() {
                let p = parent.0 as usize;
                low[p] = low[p].min(low[v]);
            }
        }
    }
    (comp, count)
}

fn first_entry(sp: &Sparse, c: usize, s: usize) -> usize {
    if c < sp.choices(s).end {
        sp.entries(c).start
    } else {
        0
    }
}

/// A maximal end component found inside a state mask: member states and
/// the member choices whose support stays inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawMec {
    pub states: Vec<u32>,
    pub choices: Vec<u32>,
}

/// Maximal end components of the sub-MDP on `in_set`, ignoring choices of
/// target states. Components without any choice are not reported.
pub(crate) fn mecs(sp: &Sparse, in_set: &[bool], targets: &[bool]) -> Vec<RawMec> {
    let mut active: Vec<bool> = (0..sp.n).map(|s| in_set[s] && !targets[s]).collect();
    let mut allowed: Vec<bool> = (0..sp.num_choices())
        .map(|c| {
            let o = sp.owner[c] as usize;
            active[o] && sp.support(c).iter().all(|&t| active[t as usize])
        })
        .collect();
    loop {
        let (comp, _) = sccs(sp, &active, &allowed);
        let mut changed = false;
        for c in 0..sp.num_choices() {
            if !allowed[c] {
                continue;
            }
            let o = sp.owner[c] as usize;
            if !active[o] || sp.support(c).iter().any(|&t| comp[t as usize] != comp[o]) {
                allowed[c] = false;
                changed = true;
            }
        }
        for s in 0..sp.n {
            if active[s] && !sp.choices(s).any(|c| allowed[c]) {
                active[s] = false;
                changed = true;
            }
        }
        if !changed {
            let mut groups: Vec<Option<usize>> = vec![None; sp.n];
            let mut out: Vec<RawMec> = Vec::new();
            for s in 0..sp.n {
                if !active[s] {
                    continue;
                }
                let k = comp[s] as usize;
                let slot = *groups[k].get_or_insert_with(|| {
                    out.push(RawMec {
                        states: Vec::new(),
                        choices: Vec::new(),
                    });
                    out.len() - 1
                });
                out[slot].states.push(s as u32);
                out[slot].choices.extend(sp.choices(s).filter(|&c| allowed[c]).map(|c| c as u32));
            }
            return out;
        }
    }
}
