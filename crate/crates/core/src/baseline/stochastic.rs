use super::synthesis::{check_layout, check_months, month_keys, rescale};
use super::{BaselineYear, Generation, Layout, MonthBlock, SlotSamplePool};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::rng::DrawStream;
use crate::timeseries::{MonthlyTotals, Slot, SLOTS_PER_WEEK};

/// Resampled hourly baseline: each hour draws, with replacement, one observed
/// value of its slot, then each month is rescaled to its total.
///
/// Draws run month-major, then day-major, hour-minor, from a single
/// [`DrawStream`] seeded with `seed`, so the output depends only on the inputs.
pub fn sample_stochastic<T: Scalar>(
    pool: &SlotSamplePool<T>,
    months: &MonthlyTotals<T>,
    layout: &Layout,
    seed: u64,
) -> Result<BaselineYear<T>> {
    sample_stochastic_traced(pool, months, layout, seed).map(|(b, _)| b)
}

/// As [`sample_stochastic`], also returning each month's pre-rescale draws.
pub fn sample_stochastic_traced<T: Scalar>(
    pool: &SlotSamplePool<T>,
    months: &MonthlyTotals<T>,
    layout: &Layout,
    seed: u64,
) -> Result<(BaselineYear<T>, Vec<Vec<T>>)> {
    check_months(months)?;
    check_layout(layout)?;
    if pool.is_empty() {
        return Err(Error::InsufficientData(
            "every slot pool is empty; nothing to sample from".to_string(),
        ));
    }
    let candidates: Vec<Vec<T>> = (0..SLOTS_PER_WEEK)
        .map(|i| pool.effective(Slot::from_index(i).unwrap()))
        .collect();
    let mut stream = DrawStream::new(seed);
    let mut draws = Vec::with_capacity(12);
    let blocks = months
        .months()
        .iter()
        .map(|m| {
            let keys = month_keys(layout, m.month);
            let raw: Vec<T> = keys
                .iter()
                .map(|k| {
                    let c = &candidates[k.slot.index()];
                    c[stream.index(c.len())]
                })
                .collect();
            draws.push(raw.clone());
            MonthBlock {
                month: m.month,
                keys,
                values: rescale(raw, m.total_kwh),
            }
        })
        .collect();
    Ok((
        BaselineYear {
            layout: *layout,
            generation: Some(Generation::Stochastic { seed }),
            months: blocks,
        },
        draws,
    ))
}
