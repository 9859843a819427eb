//! In-memory sessions. Each holds its approximation state behind an async
//! mutex (an update that finds it locked is refused, never queued) and the
//! latest encoded preview behind a separate lock so reads never wait on
//! compute.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use fractx_core::raster::ApproxState;
use fractx_core::{FamilyParams, IfsSystem, PixelBuffer};
use sha2::{Digest, Sha256};

use crate::image::encode_png;

pub struct Preview {
    pub png: Vec<u8>,
    pub etag: String,
}

impl Preview {
    pub fn of(img: &PixelBuffer) -> Self {
        let png = encode_png(img);
        let digest = Sha256::digest(&png);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        Preview {
            png,
            etag: format!("\"{hex}\""),
        }
    }
}

pub struct Work {
    pub approx: ApproxState,
    /// The family member every update is measured against.
    pub reference: IfsSystem<2>,
    pub params: FamilyParams,
}

pub struct Session {
    pub family: &'static str,
    pub work: Arc<tokio::sync::Mutex<Work>>,
    preview: RwLock<Arc<Preview>>,
    last_active: Mutex<Instant>,
}

impl Session {
    pub fn new(work: Work) -> Self {
        let preview = Preview::of(work.approx.output());
        Session {
            family: work.params.name(),
            work: Arc::new(tokio::sync::Mutex::new(work)),
            preview: RwLock::new(Arc::new(preview)),
            last_active: Mutex::new(Instant::now()),
        }
    }

    pub fn preview(&self) -> Arc<Preview> {
        self.preview.read().expect("preview lock").clone()
    }

    pub fn set_preview(&self, p: Preview) {
        *self.preview.write().expect("preview lock") = Arc::new(p);
    }

    fn touch(&self) {
        *self.last_active.lock().expect("clock lock") = Instant::now();
    }

    fn idle(&self) -> Duration {
        self.last_active.lock().expect("clock lock").elapsed()
    }
}

pub struct Store {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    ttl: Duration,
}

impl Store {
    pub fn new(ttl: Duration) -> Self {
        Store {
            sessions: RwLock::new(HashMap::new()),
            ttl,
        }
    }

    pub fn insert(&self, session: Session) -> String {
        let id = uuid::Uuid::new_v4().simple().to_string();
        self.sessions
            .write()
            .expect("store lock")
            .insert(id.clone(), Arc::new(session));
        id
    }

    /// The live session with this id, refreshing its idle clock. Expired
    /// sessions are dropped on the way.
    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        self.sweep();
        let s = self.sessions.read().expect("store lock").get(id).cloned()?;
        s.touch();
        Some(s)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sweep();
        self.sessions.write().expect("store lock").remove(id).is_some()
    }

    pub fn sweep(&self) {
        let ttl = self.ttl;
        self.sessions
            .write()
            .expect("store lock")
            .retain(|_, s| s.idle() <= ttl);
    }
}
