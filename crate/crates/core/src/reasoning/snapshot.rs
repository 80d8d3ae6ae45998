use super::ReasoningError;
use crate::invariant::{GridBox, Invariant, Tick};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OwnedBox {
    pub owner: String,
    pub bbox: GridBox,
}

/// The `(owner, box)` facts active at one tick, in canonical order
/// (owner ascending, then corner order).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpatialSnapshot {
    time: Tick,
    owned_boxes: Vec<OwnedBox>,
}

impl SpatialSnapshot {
    pub fn new(time: Tick, boxes: Vec<(String, GridBox)>) -> Self {
        let mut owned_boxes: Vec<OwnedBox> = boxes
            .into_iter()
            .map(|(owner, bbox)| OwnedBox { owner, bbox })
            .collect();
        owned_boxes.sort();
        SpatialSnapshot { time, owned_boxes }
    }

    pub fn time(&self) -> Tick {
        self.time
    }

    pub fn owned_boxes(&self) -> &[OwnedBox] {
        &self.owned_boxes
    }

    pub fn boxes_of<'a>(&'a self, owner: &'a str) -> impl Iterator<Item = GridBox> + 'a {
        self.owned_boxes
            .iter()
            .filter(move |ob| ob.owner == owner)
            .map(|ob| ob.bbox)
    }

    pub fn is_empty(&self) -> bool {
        self.owned_boxes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.owned_boxes.len()
    }
}

/// Collects the boxes whose temporal guard holds at `t`.
///
/// Each term must be a guarded occupancy `IMPLIES(AND(<time>, Owner(..)), <space>)`
/// or a conjunction of such, where `<time>` combines `TimePoint`/`TimeInterval`
/// with AND/OR and `<space>` is a conjunction of `OccupyBox`/`OccupyPoint`.
/// Any other shape is reported with its index rather than skipped.
pub fn extract_snapshot(model: &[Invariant], t: Tick) -> Result<SpatialSnapshot, ReasoningError> {
    let mut boxes = Vec::new();
    for (idx, term) in model.iter().enumerate() {
        collect(term, t, &mut boxes).ok_or(ReasoningError::UnsupportedForm(idx))?;
    }
    Ok(SpatialSnapshot::new(t, boxes))
}

fn collect(term: &Invariant, t: Tick, out: &mut Vec<(String, GridBox)>) -> Option<()> {
    match term {
        Invariant::And(a, b) => {
            collect(a, t, out)?;
            collect(b, t, out)
        }
        Invariant::Implies(guard, space) => {
            let (active, owner) = match &**guard {
                Invariant::And(a, b) => match (&**a, &**b) {
                    (Invariant::Owner(o), time) | (time, Invariant::Owner(o)) => {
                        (temporal(time, t)?, o)
                    }
                    _ => return None,
                },
                _ => return None,
            };
            let mut spatial = Vec::new();
            boxes_in(space, &mut spatial)?;
            if active {
                out.extend(spatial.into_iter().map(|b| (owner.clone(), b)));
            }
            Some(())
        }
        _ => None,
    }
}

fn temporal(term: &Invariant, t: Tick) -> Option<bool> {
    match term {
        Invariant::TimePoint(p) => Some(*p == t),
        Invariant::TimeInterval(i) => Some(i.contains(t)),
        Invariant::Or(a, b) => Some(temporal(a, t)? | temporal(b, t)?),
        Invariant::And(a, b) => Some(temporal(a, t)? & temporal(b, t)?),
        _ => None,
    }
}

fn boxes_in(term: &Invariant, out: &mut Vec<GridBox>) -> Option<()> {
    match term {
        Invariant::OccupyBox(b) => out.push(*b),
        Invariant::OccupyPoint(x, y) => out.push(GridBox::point(*x, *y)),
        Invariant::And(a, b) => {
            boxes_in(a, out)?;
            boxes_in(b, out)?;
        }
        _ => return None,
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::parse_invariant;
    use crate::reasoning::{filter_by_owner, filter_by_time};

    const REGION_A: &str = "IMPLIES(AND(OR(TimeInterval(800,950),TimeInterval(1000,1050)),Owner(\"A\")),OccupyBox(143,4056,1536,2612))";

    fn model(lines: &[&str]) -> Vec<Invariant> {
        lines.iter().map(|l| parse_invariant(l).unwrap()).collect()
    }

    #[test]
    fn region_a_formula_in_second_interval() {
        let s = extract_snapshot(&model(&[REGION_A]), 1020).unwrap();
        assert_eq!(
            s.owned_boxes(),
            &[OwnedBox {
                owner: "A".into(),
                bbox: GridBox::new(143, 2612, 1536, 4056)
            }]
        );
        // same answer through the filter route
        let filtered = filter_by_owner(&filter_by_time(&model(&[REGION_A])[0], 1020), "A").unwrap();
        assert_eq!(filtered, Invariant::OccupyBox(s.owned_boxes()[0].bbox));
    }

    #[test]
    fn region_a_formula_between_intervals_is_empty() {
        assert!(extract_snapshot(&model(&[REGION_A]), 975).unwrap().is_empty());
    }

    #[test]
    fn negative_fragment_is_rejected() {
        assert_eq!(
            extract_snapshot(&model(&["NOT(Owner(\"A\"))"]), 0),
            Err(ReasoningError::UnsupportedForm(0))
        );
        assert_eq!(
            extract_snapshot(
                &model(&[REGION_A, "IMPLIES(Owner(\"A\"),OccupyBox(0,0,1,1))"]),
                0
            ),
            Err(ReasoningError::UnsupportedForm(1))
        );
        // malformed spatial part is rejected even when the guard is inactive
        assert_eq!(
            extract_snapshot(
                &model(&["IMPLIES(AND(TimePoint(1),Owner(\"A\")),Event(\"x\"))"]),
                99
            ),
            Err(ReasoningError::UnsupportedForm(0))
        );
    }

    #[test]
    fn conjunctions_points_and_canonical_order() {
        let m = model(&[
            "AND(IMPLIES(AND(TimePoint(5),Owner(\"b\")),OccupyPoint(2,3)),IMPLIES(AND(Owner(\"a\"),TimeInterval(0,9)),AND(OccupyBox(9,9,5,5),OccupyBox(0,0,1,1))))",
        ]);
        let s = extract_snapshot(&m, 5).unwrap();
        let got: Vec<(&str, GridBox)> = s
            .owned_boxes()
            .iter()
            .map(|o| (o.owner.as_str(), o.bbox))
            .collect();
        assert_eq!(
            got,
            vec![
                ("a", GridBox::new(0, 0, 1, 1)),
                ("a", GridBox::new(5, 5, 9, 9)),
                ("b", GridBox::point(2, 3)),
            ]
        );
        assert_eq!(extract_snapshot(&m, 6).unwrap().len(), 2);
    }
}
