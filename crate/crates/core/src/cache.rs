//! Version-keyed read-through cache with single-flight loading and LRU
//! eviction.
//!
//! An entry remembers the stamp (registry revision) it was loaded under. A
//! lookup with a different stamp is a miss and reloads, so a reader can never
//! get a document older than the registry state it is looking at.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;
use serde::Serialize;

pub const DEFAULT_CAPACITY: usize = 1024;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub invalidations: u64,
    pub evictions: u64,
    pub entries: u64,
}

impl CacheStats {
    /// `name value` lines, one counter per line.
    pub fn exposition(&self, prefix: &str) -> String {
        format!(
            "{prefix}_hits {}\n{prefix}_misses {}\n{prefix}_invalidations {}\n{prefix}_evictions {}\n{prefix}_entries {}\n",
            self.hits, self.misses, self.invalidations, self.evictions, self.entries
        )
    }
}

struct Cell<S, V> {
    value: Mutex<Option<(S, Arc<V>)>>,
}

struct Lru<K, S, V> {
    map: HashMap<K, (Arc<Cell<S, V>>, u64)>,
    order: BTreeMap<u64, K>,
    tick: u64,
}

pub struct VersionedCache<K, S, V> {
    capacity: usize,
    lru: Mutex<Lru<K, S, V>>,
    hits: AtomicU64,
    misses: AtomicU64,
    invalidations: AtomicU64,
    evictions: AtomicU64,
}

impl<K, S, V> VersionedCache<K, S, V>
where
    K: Hash + Eq + Clone,
    S: Eq + Clone,
{
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "cache capacity must be positive");
        VersionedCache {
            capacity,
            lru: Mutex::new(Lru { map: HashMap::new(), order: BTreeMap::new(), tick: 0 }),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            invalidations: AtomicU64::new(0),
            evictions: AtomicU64::new(0),
        }
    }

    fn cell(&self, key: &K) -> Arc<Cell<S, V>> {
        let mut lru = self.lru.lock();
        lru.tick += 1;
        let tick = lru.tick;
        if let Some((cell, old)) = lru.map.get_mut(key) {
            let cell = cell.clone();
            let old = std::mem::replace(old, tick);
            lru.order.remove(&old);
            lru.order.insert(tick, key.clone());
            return cell;
        }
        let cell = Arc::new(Cell { value: Mutex::new(None) });
        lru.map.insert(key.clone(), (cell.clone(), tick));
        lru.order.insert(tick, key.clone());
        while lru.map.len() > self.capacity {
            let (_, victim) = lru.order.pop_first().expect("order tracks every entry");
            lru.map.remove(&victim);
            self.evictions.fetch_add(1, Ordering::Relaxed);
        }
        cell
    }

    /// Returns the cached value for `key` if it was loaded under `stamp`;
    /// otherwise runs `load` (once, even with concurrent callers) and caches
    /// the result. Errors are returned and not cached.
    pub fn get_or_load<E>(&self, key: &K, stamp: &S, load: impl FnOnce() -> Result<V, E>) -> Result<Arc<V>, E> {
        let cell = self.cell(key);
        let mut slot = cell.value.lock();
        if let Some((s, v)) = slot.as_ref() {
            if s == stamp {
                self.hits.fetch_add(1, Ordering::Relaxed);
                return Ok(v.clone());
            }
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let value = Arc::new(load()?);
        *slot = Some((stamp.clone(), value.clone()));
        Ok(value)
    }

    /// Drops the entry for `key`. Other keys are untouched.
    pub fn invalidate(&self, key: &K) {
        self.invalidations.fetch_add(1, Ordering::Relaxed);
        let mut lru = self.lru.lock();
        if let Some((_, tick)) = lru.map.remove(key) {
            lru.order.remove(&tick);
        }
    }

    /// Drops every entry whose key matches; counts as one invalidation.
    pub fn invalidate_where(&self, pred: impl Fn(&K) -> bool) {
        self.invalidations.fetch_add(1, Ordering::Relaxed);
        let mut lru = self.lru.lock();
        let doomed: Vec<(K, u64)> = lru.map.iter().filter(|(k, _)| pred(k)).map(|(k, (_, t))| (k.clone(), *t)).collect();
        for (k, t) in doomed {
            lru.map.remove(&k);
            lru.order.remove(&t);
        }
    }

    pub fn contains(&self, key: &K) -> bool {
        self.lru.lock().map.contains_key(key)
    }

    /// Counters are individually atomic; `entries` is read under the map lock.
    pub fn stats(&self) -> CacheStats {
        let entries = self.lru.lock().map.len() as u64;
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            invalidations: self.invalidations.load(Ordering::Relaxed),
            evictions: self.evictions.load(Ordering::Relaxed),
            entries,
        }
    }
}
