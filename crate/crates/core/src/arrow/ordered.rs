//! The order-preserving construction: `h[D0] = D1`, `h[W] = W`, and `h`
//! monotone at every point of `W`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conemap::Mode;
use crate::engine::{class_list, EngineRun, EnumCache, StagePolicy, TransportedSet};
use crate::error::{Error, Result};
use crate::point::EpPoint;
use crate::tailclass::{SetPresentation, TailClass};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedInstance {
    #[serde(rename = "D0")]
    pub d0: SetPresentation,
    #[serde(rename = "D1")]
    pub d1: SetPresentation,
    #[serde(rename = "W")]
    pub w: SetPresentation,
}

/// `d_n` runs through `D0` forward and `D1` backward, and `K_n` through `W`.
/// Classes carry a color; partners are only drawn from classes of the same
/// color.
#[derive(Debug)]
pub struct OrderedPolicy {
    pub instance: OrderedInstance,
    colors: BTreeMap<TailClass, u8>,
    d0_enum: EnumCache,
    d1_enum: EnumCache,
    w_enum: EnumCache,
}

impl OrderedPolicy {
    pub fn new(instance: OrderedInstance) -> Result<Self> {
        Self::colored(instance, BTreeMap::new())
    }

    /// Classes missing from `colors` get color 0.
    pub fn colored(instance: OrderedInstance, colors: BTreeMap<TailClass, u8>) -> Result<Self> {
        let c0 = class_list("D0", &instance.d0)?;
        let c1 = class_list("D1", &instance.d1)?;
        if let Some(c) = c0.iter().chain(&c1).find(|c| c.is_q()) {
            return Err(Error::InstanceRejected(format!("class {c} has immediate neighbours")));
        }
        if !instance.w.is_saturated() {
            return Err(Error::InstanceRejected("W must be saturated".into()));
        }
        if let Some(c) = instance.w.class_iter().take(2).find(|c| c.is_q() && instance.w.contains_class(c)) {
            return Err(Error::InstanceRejected(format!("W meets Q in class {c}")));
        }
        if let Some(c) = c0.iter().chain(&c1).find(|c| instance.w.contains_class(c)) {
            return Err(Error::InstanceRejected(format!("W meets D in class {c}")));
        }
        let color = |c: &TailClass| colors.get(c).copied().unwrap_or(0);
        for c in &c0 {
            if !c1.iter().any(|d| color(d) == color(c)) {
                return Err(Error::InstanceRejected(format!("no D1 class has the color of {c}")));
            }
        }
        for c in &c1 {
            if !c0.iter().any(|d| color(d) == color(c)) {
                return Err(Error::InstanceRejected(format!("no D0 class has the color of {c}")));
            }
        }
        Ok(OrderedPolicy {
            d0_enum: EnumCache::new(instance.d0.clone()),
            d1_enum: EnumCache::new(instance.d1.clone()),
            w_enum: EnumCache::new(instance.w.clone()),
            instance,
            colors,
        })
    }

    fn color(&self, c: &TailClass) -> u8 {
        self.colors.get(c).copied().unwrap_or(0)
    }

    fn pool(&self, from: &SetPresentation, x: &EpPoint) -> Vec<TailClass> {
        let c = self.color(&TailClass::of(x));
        from.class_iter().filter(|d| self.color(d) == c).collect()
    }
}

impl StagePolicy for OrderedPolicy {
    fn mode(&self) -> Mode {
        Mode::Ordered
    }

    fn forward_point(&self, n: usize) -> EpPoint {
        self.d0_enum.nth(n)
    }

    fn backward_point(&self, n: usize) -> EpPoint {
        self.d1_enum.nth(n)
    }

    fn witness_points(&self, n: usize) -> Vec<EpPoint> {
        self.w_enum.prefix(n + 1)
    }

    fn forward_pool(&self, d: &EpPoint) -> Vec<TailClass> {
        self.pool(&self.instance.d1, d)
    }

    fn backward_pool(&self, y: &EpPoint) -> Vec<TailClass> {
        self.pool(&self.instance.d0, y)
    }

    fn transported_sets(&self) -> Vec<TransportedSet> {
        vec![
            TransportedSet::new("D", self.instance.d0.clone(), self.instance.d1.clone()),
            TransportedSet::new("W", self.instance.w.clone(), self.instance.w.clone()),
        ]
    }

    fn monotone_set(&self) -> Option<SetPresentation> {
        Some(self.instance.w.clone())
    }
}

pub fn ordered_synthesize(instance: &OrderedInstance, stages: usize) -> Result<(OrderedPolicy, EngineRun)> {
    let policy = OrderedPolicy::new(instance.clone())?;
    let mut run = EngineRun::new();
    run.drive_to(stages, &policy)?;
    Ok((policy, run))
}
