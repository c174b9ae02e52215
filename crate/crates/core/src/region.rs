//! Regions: closed subdiagrams of a static model, the spatial part of events.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::diag::Code;
use crate::model::{Element, ElementId, StaticModel};

/// A set of element ids. Regions built by [`make_region`] are closed: every
/// arc has its endpoints inside and every action its owning thimac.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Region {
    elements: BTreeSet<ElementId>,
    origin: Option<u64>,
}

impl Region {
    pub fn empty() -> Self {
        Region::default()
    }

    /// Wraps raw ids without checking them against any model.
    pub fn from_ids(ids: impl IntoIterator<Item = ElementId>) -> Self {
        Region {
            elements: ids.into_iter().collect(),
            origin: None,
        }
    }

    pub fn elements(&self) -> &BTreeSet<ElementId> {
        &self.elements
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.elements.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Fingerprint of the model this region was checked against, if any.
    pub fn origin(&self) -> Option<u64> {
        self.origin
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error("element {0} is not part of the model")]
    UnknownId(ElementId),
    #[error("arc {arc} has endpoint {endpoint} outside the region")]
    Closure { arc: ElementId, endpoint: ElementId },
    #[error("regions belong to different models")]
    ModelMismatch,
}

impl RegionError {
    pub fn code(&self) -> Code {
        match self {
            RegionError::UnknownId(_) => Code::UnknownId,
            RegionError::Closure { .. } => Code::Closure,
            RegionError::ModelMismatch => Code::ModelMismatch,
        }
    }
}

/// Builds a region from `ids`, adding the owning thimac of every listed
/// action. Missing arc endpoints are never added.
pub fn make_region(
    model: &StaticModel,
    ids: impl IntoIterator<Item = ElementId>,
) -> Result<Region, RegionError> {
    let mut elements: BTreeSet<ElementId> = BTreeSet::new();
    for id in ids {
        if !model.contains(id) {
            return Err(RegionError::UnknownId(id));
        }
        elements.insert(id);
    }
    let owners: Vec<ElementId> = elements
        .iter()
        .filter_map(|&id| model.owner_of(id))
        .collect();
    for owner in owners {
        if !model.contains(owner) {
            return Err(RegionError::UnknownId(owner));
        }
        elements.insert(owner);
    }
    if let Some(err) = first_open_arc(model, &elements) {
        return Err(err);
    }
    Ok(Region {
        elements,
        origin: Some(model.fingerprint()),
    })
}

fn first_open_arc(model: &StaticModel, elements: &BTreeSet<ElementId>) -> Option<RegionError> {
    for &id in elements {
        let endpoints: &[ElementId] = match model.get(id) {
            Some(Element::Arrow(a)) => &[a.src, a.dst],
            Some(Element::Negative(n)) => std::slice::from_ref(&n.src),
            _ => continue,
        };
        if let Some(&endpoint) = endpoints.iter().find(|e| !elements.contains(e)) {
            return Some(RegionError::Closure { arc: id, endpoint });
        }
    }
    None
}

/// Union of two regions of the same model. The union of closed sets is
/// closed, so no model is needed.
pub fn merge_regions(a: &Region, b: &Region) -> Result<Region, RegionError> {
    let origin = match (a.origin, b.origin) {
        (Some(x), Some(y)) if x != y => return Err(RegionError::ModelMismatch),
        (x, y) => x.or(y),
    };
    Ok(Region {
        elements: a.elements.union(&b.elements).copied().collect(),
        origin,
    })
}

/// Region holding every element of the model.
pub fn whole_model(model: &StaticModel) -> Region {
    Region {
        elements: model.ids().collect(),
        origin: Some(model.fingerprint()),
    }
}
