use crate::config::saturating_pow;
use std::ops::ControlFlow;

pub fn allocation_count(agents: usize, goods: usize) -> u64 {
    saturating_pow(agents as u64, goods)
}

/// Visits every owner vector (good → agent) in lexicographic order, good 0
/// most significant, until `visit` breaks.
pub fn for_each_owner_vector<B>(
    agents: usize,
    goods: usize,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    if agents == 0 {
        return None;
    }
    let mut current = vec![0usize; goods];
    loop {
        if let ControlFlow::Break(b) = visit(&current) {
            return Some(b);
        }
        let mut carried = true;
        for slot in current.iter_mut().rev() {
            *slot += 1;
            if *slot < agents {
                carried = false;
                break;
            }
            *slot = 0;
        }
        if carried {
            return None;
        }
    }
}
