use crate::instances::MarriageTable;
use crate::par::Pool;

const FREE: usize = usize::MAX;

fn rank_table(table: &MarriageTable) -> Vec<u32> {
    let n = table.len();
    let mut rank = vec![0u32; n * n];
    for (w, list) in table.women.iter().enumerate() {
        for (r, &m) in list.iter().enumerate() {
            rank[w * n + m] = r as u32;
        }
    }
    rank
}

/// Man-proposing Gale–Shapley. Returns each man's final proposal index.
pub fn gale_shapley(table: &MarriageTable) -> Vec<u64> {
    let n = table.len();
    let rank = rank_table(table);
    let mut next = vec![0usize; n];
    let mut partner = vec![FREE; n];
    let mut free: Vec<usize> = (0..n).rev().collect();
    while let Some(m) = free.pop() {
        let w = table.men[m][next[m]];
        let current = partner[w];
        if current == FREE {
            partner[w] = m;
        } else if rank[w * n + m] < rank[w * n + current] {
            partner[w] = m;
            next[current] += 1;
            free.push(current);
        } else {
            next[m] += 1;
            free.push(m);
        }
    }
    next.into_iter().map(|p| p as u64).collect()
}

/// Round-synchronous Gale–Shapley: every free man proposes at once, then
/// each woman keeps her best suitor and the rest queue for the next round.
pub fn gale_shapley_rounds(table: &MarriageTable, pool: &Pool) -> Vec<u64> {
    let n = table.len();
    let rank = rank_table(table);
    let mut next = vec![0usize; n];
    let mut partner = vec![FREE; n];
    let mut free: Vec<usize> = (0..n).collect();
    while !free.is_empty() {
        let proposals: Vec<(usize, usize)> = pool
            .map_ranges(free.len(), |range| {
                free[range]
                    .iter()
                    .map(|&m| (table.men[m][next[m]], m))
                    .collect::<Vec<_>>()
            })
            .concat();
        free.clear();
        for (w, m) in proposals {
            let current = partner[w];
            if current == FREE {
                partner[w] = m;
            } else if rank[w * n + m] < rank[w * n + current] {
                partner[w] = m;
                next[current] += 1;
                free.push(current);
            } else {
                next[m] += 1;
                free.push(m);
            }
        }
    }
    next.into_iter().map(|p| p as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_by_hand() {
        let t = MarriageTable {
            men: vec![vec![0, 1], vec![0, 1]],
            women: vec![vec![1, 0], vec![0, 1]],
        };
        assert_eq!(gale_shapley(&t), vec![1, 0]);
        assert_eq!(gale_shapley_rounds(&t, &Pool::new(2).unwrap()), vec![1, 0]);
    }

    #[test]
    fn rounds_agree_with_sequential() {
        for seed in 0..30 {
            let spec = "sm:n=40".parse().unwrap();
            let crate::instances::Instance::Marriage(t) =
                crate::instances::generate(&spec, seed).unwrap()
            else {
                panic!()
            };
            assert_eq!(
                gale_shapley_rounds(&t, &Pool::new(3).unwrap()),
                gale_shapley(&t)
            );
        }
    }
}
