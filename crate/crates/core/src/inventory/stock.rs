use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InventoryError {
    #[error("request quantity must be positive")]
    NonPositiveQuantity,
    /// `partial_quantities` was called outside the partial branch.
    #[error("partial fulfilment needs current > minimum and current - requested < minimum (current {current}, minimum {minimum}, requested {requested})")]
    NotPartial {
        current: u64,
        minimum: u64,
        requested: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub id: String,
    pub item: String,
    pub quantity: u64,
    pub origin: String,
    /// Set when the request was only partly met and waits for the rest.
    pub pending_quantity: u64,
}

impl Request {
    pub fn new(id: impl Into<String>, item: impl Into<String>, quantity: u64, origin: impl Into<String>) -> Self {
        Request {
            id: id.into(),
            item: item.into(),
            quantity,
            origin: origin.into(),
            pending_quantity: 0,
        }
    }

    /// What is still owed on this request.
    pub fn outstanding(&self) -> u64 {
        if self.pending_quantity > 0 {
            self.pending_quantity
        } else {
            self.quantity
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    FullDelivery,
    PartialDelivery,
    Queued,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub delivered: u64,
    pub enqueued_pending: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub vendor: String,
    pub quantity: u64,
}

impl Delivery {
    pub fn new(vendor: impl Into<String>, quantity: u64) -> Self {
        Delivery {
            vendor: vendor.into(),
            quantity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventoryState {
    pub current_stock: u64,
    pub minimum: u64,
    pub maximum: u64,
    pub queue: VecDeque<Request>,
    pub pending_total: u64,
    pub queued_count: u64,
}

pub fn compute_new_stock(current: u64, requested: u64) -> i64 {
    current as i64 - requested as i64
}

/// Splits a request that cannot be fully met into what can be issued now,
/// keeping the minimum in stock, and what stays pending.
pub fn partial_quantities(current: u64, minimum: u64, requested: u64) -> Result<(u64, u64), InventoryError> {
    if current <= minimum || compute_new_stock(current, requested) >= minimum as i64 {
        return Err(InventoryError::NotPartial {
            current,
            minimum,
            requested,
        });
    }
    let available = current - minimum;
    Ok((available, requested - available))
}

impl InventoryState {
    pub fn new(current_stock: u64, minimum: u64, maximum: u64) -> Self {
        InventoryState {
            current_stock,
            minimum,
            maximum,
            queue: VecDeque::new(),
            pending_total: 0,
            queued_count: 0,
        }
    }

    /// Order-up-to-maximum replenishment size.
    pub fn reorder_quantity(&self) -> u64 {
        self.maximum.saturating_sub(self.current_stock)
    }

    pub fn handle_request(&mut self, mut request: Request) -> Result<Outcome, InventoryError> {
        if request.quantity == 0 {
            return Err(InventoryError::NonPositiveQuantity);
        }
        let wanted = request.outstanding();
        if self.current_stock <= self.minimum {
            self.enqueue(request);
            return Ok(Outcome {
                kind: OutcomeKind::Queued,
                delivered: 0,
                enqueued_pending: wanted,
            });
        }
        let new_stock = compute_new_stock(self.current_stock, wanted);
        if new_stock >= self.minimum as i64 {
            self.current_stock = new_stock as u64;
            return Ok(Outcome {
                kind: OutcomeKind::FullDelivery,
                delivered: wanted,
                enqueued_pending: 0,
            });
        }
        let (available, pending) = partial_quantities(self.current_stock, self.minimum, wanted)?;
        self.current_stock -= available;
        request.pending_quantity = pending;
        self.enqueue(request);
        Ok(Outcome {
            kind: OutcomeKind::PartialDelivery,
            delivered: available,
            enqueued_pending: pending,
        })
    }

    fn enqueue(&mut self, request: Request) {
        self.pending_total += request.outstanding();
        self.queued_count += 1;
        self.queue.push_back(request);
    }

    /// Adds the delivery to stock, then serves queued requests in order
    /// while stock is above the minimum. Returns each request served with
    /// the quantity released to it. A request that can only be partly met
    /// goes back to the end of the queue, which ends the drain.
    pub fn receive_delivery(&mut self, delivery: &Delivery) -> Vec<(Request, u64)> {
        self.current_stock += delivery.quantity;
        let mut released = Vec::new();
        while self.current_stock > self.minimum {
            let Some(request) = self.queue.pop_front() else { break };
            self.pending_total -= request.outstanding();
            self.queued_count -= 1;
            let outcome = self
                .handle_request(request.clone())
                .expect("queued requests have positive quantity");
            released.push((request, outcome.delivered));
        }
        released
    }
}
