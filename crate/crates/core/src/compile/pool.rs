use std::sync::{Condvar, Mutex};

/// Counting semaphore limiting concurrent engine processes. Waiters queue;
/// none are turned away.
#[derive(Debug)]
pub struct EnginePool {
    free: Mutex<usize>,
    cv: Condvar,
    size: usize,
}

pub struct PoolSlot<'a> {
    pool: &'a EnginePool,
}

impl EnginePool {
    pub fn new(size: usize) -> Self {
        let size = size.max(1);
        Self {
            free: Mutex::new(size),
            cv: Condvar::new(),
            size,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn acquire(&self) -> PoolSlot<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        PoolSlot { pool: self }
    }
}

impl Drop for PoolSlot<'_> {
    fn drop(&mut self) {
        let mut free = self.pool.free.lock().unwrap_or_else(|e| e.into_inner());
        *free += 1;
        self.pool.cv.notify_one();
    }
}
