use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::iet::Permutation;

use super::RvStep;

/// Permutation of `R(T)` after a step of the given type.
pub fn step_permutation(perm: &Permutation, step: RvStep) -> Permutation {
    let d = perm.d();
    let last = d - 1;
    let k = perm.preimage(last);
    let images = match step {
        RvStep::A => (0..d)
            .map(|j| {
                if j <= k {
                    perm.image(j)
                } else if j == k + 1 {
                    perm.image(last)
                } else {
                    perm.image(j - 1)
                }
            })
            .collect(),
        RvStep::B => {
            let pd = perm.image(last);
            (0..d)
                .map(|j| {
                    let p = perm.image(j);
                    if p <= pd {
                        p
                    } else if p < last {
                        p + 1
                    } else {
                        pd + 1
                    }
                })
                .collect()
        }
    };
    Permutation::from_zero_based(images)
}

/// All permutations reachable from `perm` by steps `a` and `b`, sorted.
pub fn rauzy_class(perm: &Permutation) -> Result<Vec<Permutation>> {
    if !perm.is_irreducible() {
        return Err(Error::Reducible(perm.to_string()));
    }
    let mut seen = BTreeSet::from([perm.clone()]);
    let mut queue = VecDeque::from([perm.clone()]);
    while let Some(p) = queue.pop_front() {
        for step in [RvStep::A, RvStep::B] {
            let next = step_permutation(&p, step);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_classes() {
        assert_eq!(rauzy_class(&p(&[2, 1])).unwrap(), vec![p(&[2, 1])]);
        let c3 = rauzy_class(&p(&[3, 2, 1])).unwrap();
        assert_eq!(c3, vec![p(&[2, 3, 1]), p(&[3, 1, 2]), p(&[3, 2, 1])]);
        assert!(rauzy_class(&p(&[1, 2])).is_err());
    }

    #[test]
    fn class_of_reversal_4_is_closed() {
        let c = rauzy_class(&Permutation::reversal(4)).unwrap();
        assert_eq!(c.len(), 7);
        let set: BTreeSet<_> = c.iter().cloned().collect();
        for q in &c {
            assert!(q.is_irreducible());
            for s in [RvStep::A, RvStep::B] {
                assert!(set.contains(&step_permutation(q, s)));
            }
        }
    }

    #[test]
    fn bfs_oracle_by_enumeration() {
        // brute force: every irreducible permutation of 4 reachable by repeated
        // application, computed by fixed-point iteration over the full S_4
        let all: Vec<Permutation> = permutations(4).into_iter().filter(Permutation::is_irreducible).collect();
        let start = Permutation::reversal(4);
        let mut reach = BTreeSet::from([start.clone()]);
        loop {
            let before = reach.len();
            for q in &all {
                if reach.iter().any(|r| step_permutation(r, RvStep::A) == *q || step_permutation(r, RvStep::B) == *q) {
                    reach.insert(q.clone());
                }
            }
            if reach.len() == before {
                break;
            }
        }
        assert_eq!(reach.into_iter().collect::<Vec<_>>(), rauzy_class(&start).unwrap());
    }

    fn permutations(d: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, d: usize, out: &mut Vec<Permutation>) {
            if prefix.len() == d {
                out.push(Permutation::new(prefix.iter().map(|x| x + 1).collect()).unwrap());
                return;
            }
            for x in 0..d {
                if !prefix.contains(&x) {
                    prefix.push(x);
                    rec(prefix, d, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), d, &mut out);
        out
    }
}
