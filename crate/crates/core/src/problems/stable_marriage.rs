use crate::instances::MarriageTable;
use crate::problem::{LatticeLinearProblem, SolveError, WorkItem};
use crate::state::{GlobalState, LatticeOrder};
use crate::worklist::Worklist;

/// Man-optimal stable marriage. Coordinate `m` is the index into man `m`'s
/// preference list of the woman he currently proposes to. Man `m` is
/// forbidden when another man proposes to the same woman and she prefers him.
pub struct StableMarriage<'a> {
    table: &'a MarriageTable,
    /// `rank[w * n + m]`: position of man `m` in woman `w`'s list.
    rank: Vec<u32>,
    bound: Vec<u64>,
}

impl<'a> StableMarriage<'a> {
    pub fn new(table: &'a MarriageTable) -> Result<Self, SolveError> {
        table
            .validate()
            .map_err(|e| SolveError::MalformedInstance(e.to_string()))?;
        let n = table.len();
        let mut rank = vec![0u32; n * n];
        for (w, list) in table.women.iter().enumerate() {
            for (r, &m) in list.iter().enumerate() {
                rank[w * n + m] = r as u32;
            }
        }
        Ok(StableMarriage {
            table,
            rank,
            bound: vec![n.saturating_sub(1) as u64; n],
        })
    }

    #[inline]
    fn n(&self) -> usize {
        self.table.len()
    }

    #[inline]
    fn target(&self, man: usize, proposal: u64) -> usize {
        self.table.men[man][proposal as usize]
    }

    /// Does woman `w` strictly prefer man `a` to man `b`?
    #[inline]
    fn prefers(&self, w: usize, a: usize, b: usize) -> bool {
        let row = &self.rank[w * self.n()..];
        row[a] < row[b]
    }

    fn forbidden_at(&self, state: &GlobalState, man: usize, proposal: u64) -> bool {
        let woman = self.target(man, proposal);
        (0..self.n()).any(|other| {
            other != man
                && self.target(other, state.read(other)) == woman
                && self.prefers(woman, other, man)
        })
    }
}

impl LatticeLinearProblem for StableMarriage<'_> {
    type State = ();

    fn size(&self) -> usize {
        self.n()
    }

    fn order(&self) -> LatticeOrder {
        LatticeOrder::Max
    }

    fn bound(&self) -> Option<&[u64]> {
        Some(&self.bound)
    }

    fn init_global_state(&self) -> GlobalState {
        GlobalState::new(std::iter::repeat_n(0, self.n()), ())
    }

    fn initial_states_to_process<W: Worklist>(&self, _state: &GlobalState, worklist: &W) {
        worklist.push_all((0..self.n()).map(WorkItem::from));
    }

    fn is_forbidden(&self, state: &GlobalState, index: usize) -> bool {
        self.forbidden_at(state, index, state.read(index))
    }

    /// Moves one step down the list, but only from a proposal observed to be
    /// forbidden: a concurrent advance of the same man is never doubled.
    fn advance<W: Worklist>(
        &self,
        state: &GlobalState,
        index: usize,
        worklist: &W,
    ) -> Result<bool, SolveError> {
        let mut current = state.read(index);
        loop {
            if !self.forbidden_at(state, index, current) {
                return Ok(false);
            }
            let next = current + 1;
            self.check_bound(index, next)?;
            match state.compare_and_swap(index, current, next) {
                Ok(_) => {
                    let woman = self.target(index, next);
                    worklist.push(WorkItem::new(index, next));
                    worklist.push_all((0..self.n()).filter(|&m| m != index).filter_map(|m| {
                        let p = state.read(m);
                        (self.target(m, p) == woman).then_some(WorkItem::new(m, p))
                    }));
                    return Ok(true);
                }
                Err(observed) => current = observed,
            }
        }
    }

    fn final_solution(&self, state: GlobalState) -> Vec<u64> {
        state.into_values()
    }
}

/// `(man, woman)` pairs who both prefer each other to their partners: an independent
/// O(n²) stability check over proposal indices.
pub fn blocking_pairs(table: &MarriageTable, proposals: &[u64]) -> Vec<(usize, usize)> {
    let n = table.len();
    let mut husband = vec![usize::MAX; n];
    for (m, &p) in proposals.iter().enumerate() {
        husband[table.men[m][p as usize]] = m;
    }
    let woman_rank = |w: usize, m: usize| table.women[w].iter().position(|&x| x == m).unwrap();
    let mut pairs = Vec::new();
    for (m, &p) in proposals.iter().enumerate() {
        // Every woman m ranks above his wife.
        for &w in &table.men[m][..p as usize] {
            let h = husband[w];
            if h == usize::MAX || woman_rank(w, m) < woman_rank(w, h) {
                pairs.push((m, w));
            }
        }
    }
    pairs
}

/// Whether `proposals` assigns each woman to exactly one man.
pub fn is_perfect_matching(table: &MarriageTable, proposals: &[u64]) -> bool {
    let n = table.len();
    let mut taken = vec![false; n];
    proposals.len() == n
        && proposals.iter().enumerate().all(|(m, &p)| {
            (p as usize) < n && !std::mem::replace(&mut taken[table.men[m][p as usize]], true)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_sequential, Strategy};

    fn table(men: Vec<Vec<usize>>, women: Vec<Vec<usize>>) -> MarriageTable {
        MarriageTable { men, women }
    }

    #[test]
    fn two_by_two() {
        let t = table(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]]);
        let sm = StableMarriage::new(&t).unwrap();
        let out = solve_sequential(&sm, Strategy::BagST).unwrap().values;
        assert_eq!(out, vec![1, 0]);
        assert!(blocking_pairs(&t, &out).is_empty());
        assert!(is_perfect_matching(&t, &out));
    }

    #[test]
    fn singleton() {
        let t = table(vec![vec![0]], vec![vec![0]]);
        let sm = StableMarriage::new(&t).unwrap();
        assert_eq!(
            solve_sequential(&sm, Strategy::CyclicST).unwrap().values,
            vec![0]
        );
    }

    #[test]
    fn checker_finds_blocking_pair() {
        let t = table(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]]);
        // m0 with w0, m1 with w1: w0 prefers m1, and m1 prefers w0.
        assert_eq!(blocking_pairs(&t, &[0, 1]), vec![(1, 0)]);
    }

    #[test]
    fn rejects_incomplete_lists() {
        let t = table(vec![vec![0, 1], vec![0]], vec![vec![0, 1], vec![1, 0]]);
        assert!(StableMarriage::new(&t).is_err());
    }

    #[test]
    fn advance_past_list_end_is_infeasible() {
        let t = table(vec![vec![0, 1], vec![0, 1]], vec![vec![1, 0], vec![0, 1]]);
        let sm = StableMarriage::new(&t).unwrap();
        // Both men at their last choice w1, who prefers m0: m1 has nowhere left to go.
        let state = GlobalState::new([1, 1], ());
        assert!(sm.is_forbidden(&state, 1));
        let err = sm
            .advance(&state, 1, &crate::worklist::NullWorklist)
            .unwrap_err();
        assert_eq!(err, SolveError::Infeasible { index: 1, bound: 1 });
    }
}
