//! Lazy, memoized, possibly infinite streams.
//!
//! A stream node is `Nil`, `Cons(head, tail)` or a suspension. Suspensions are
//! forced at most once; the result is cached, so re-reading a stream never
//! repeats work. Streams are `Send + Sync` and may be forced from any thread.

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub struct Stream<T>(Arc<Node<T>>);

enum Node<T> {
    Nil,
    Cons(T, Stream<T>),
    Lazy(Suspension<T>),
}

type Thunk<T> = Box<dyn FnOnce() -> Stream<T> + Send>;

struct Suspension<T> {
    value: OnceLock<Stream<T>>,
    thunk: Mutex<Option<Thunk<T>>>,
}

impl<T> Suspension<T> {
    fn force(&self) -> &Stream<T> {
        self.value.get_or_init(|| {
            let f = self
                .thunk
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .take()
                .expect("suspension forced re-entrantly");
            f()
        })
    }
}

/// One forced layer of a stream.
pub enum Step<T> {
    Nil,
    Cons(T, Stream<T>),
    Delayed(Stream<T>),
}

impl<T> Clone for Stream<T> {
    fn clone(&self) -> Self {
        Stream(self.0.clone())
    }
}

impl<T> Drop for Stream<T> {
    // Unlink long forced chains iteratively.
    fn drop(&mut self) {
        let mut next = match Arc::get_mut(&mut self.0) {
            Some(node) => take_tail(node),
            None => return,
        };
        while let Some(mut s) = next {
            next = match Arc::get_mut(&mut s.0) {
                Some(node) => take_tail(node),
                None => None,
            };
        }
    }
}

fn take_tail<T>(node: &mut Node<T>) -> Option<Stream<T>> {
    match node {
        Node::Nil => None,
        Node::Cons(_, tail) => Some(std::mem::replace(tail, Stream(Arc::new(Node::Nil)))),
        Node::Lazy(s) => s.value.take(),
    }
}

impl<T: Clone + Send + Sync + 'static> Stream<T> {
    pub fn nil() -> Stream<T> {
        Stream(Arc::new(Node::Nil))
    }

    pub fn cons(head: T, tail: Stream<T>) -> Stream<T> {
        Stream(Arc::new(Node::Cons(head, tail)))
    }

    pub fn single(head: T) -> Stream<T> {
        Stream::cons(head, Stream::nil())
    }

    /// A suspended stream, computed on first demand.
    pub fn lazy(f: impl FnOnce() -> Stream<T> + Send + 'static) -> Stream<T> {
        Stream(Arc::new(Node::Lazy(Suspension {
            value: OnceLock::new(),
            thunk: Mutex::new(Some(Box::new(f))),
        })))
    }

    pub fn from_vec(items: Vec<T>) -> Stream<T> {
        items.into_iter().rev().fold(Stream::nil(), |acc, x| Stream::cons(x, acc))
    }

    /// Forces at most one suspension.
    pub fn step(&self) -> Step<T> {
        match &*self.0 {
            Node::Nil => Step::Nil,
            Node::Cons(h, t) => Step::Cons(h.clone(), t.clone()),
            Node::Lazy(s) => Step::Delayed(s.force().clone()),
        }
    }

    /// Forces suspensions until the head is available.
    pub fn uncons(&self) -> Option<(T, Stream<T>)> {
        let mut s = self.clone();
        loop {
            let next = match &*s.0 {
                Node::Nil => return None,
                Node::Cons(h, t) => return Some((h.clone(), t.clone())),
                Node::Lazy(susp) => susp.force().clone(),
            };
            s = next;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.uncons().is_none()
    }

    /// Whether the head is immediately available without forcing.
    pub fn is_forced(&self) -> bool {
        match &*self.0 {
            Node::Lazy(s) => s.value.get().is_some_and(Stream::is_forced),
            _ => true,
        }
    }

    /// First `n` elements; never forces beyond what they require.
    pub fn take(&self, n: usize) -> Vec<T> {
        self.iter().take(n).collect()
    }

    /// First element. Fails on an empty stream.
    pub fn get(&self) -> Option<T> {
        self.uncons().map(|(h, _)| h)
    }

    /// All elements. Diverges on an infinite stream.
    pub fn list_of_stream(&self) -> Vec<T> {
        self.iter().collect()
    }

    pub fn iter(&self) -> StreamIter<T> {
        StreamIter(self.clone())
    }

    /// Sequential concatenation; `rest` is only forced once `self` is exhausted.
    pub fn append(&self, rest: impl FnOnce() -> Stream<T> + Send + 'static) -> Stream<T> {
        let s = self.clone();
        Stream::lazy(move || match s.uncons() {
            None => rest(),
            Some((h, t)) => Stream::cons(h, t.append(rest)),
        })
    }

    /// Concatenation that yields to `other` whenever `self` is suspended:
    /// sequential on forced prefixes, interleaving at suspensions.
    pub fn mplus(&self, other: Stream<T>) -> Stream<T> {
        match &*self.0 {
            Node::Nil => other,
            Node::Cons(h, t) => Stream::cons(h.clone(), t.mplus(other)),
            Node::Lazy(_) => {
                let s = self.clone();
                Stream::lazy(move || match s.step() {
                    Step::Nil => other,
                    Step::Cons(h, t) => Stream::cons(h, t.mplus(other)),
                    Step::Delayed(inner) => other.mplus(inner),
                })
            }
        }
    }

    pub fn map<U: Clone + Send + Sync + 'static>(
        &self,
        f: impl Fn(T) -> U + Send + Sync + 'static,
    ) -> Stream<U> {
        map_arc(self.clone(), Arc::new(f))
    }

    pub fn filter(&self, p: impl Fn(&T) -> bool + Send + Sync + 'static) -> Stream<T> {
        filter_arc(self.clone(), Arc::new(p))
    }

    /// Like `filter` and `map` together.
    pub fn filter_map<U: Clone + Send + Sync + 'static>(
        &self,
        f: impl Fn(T) -> Option<U> + Send + Sync + 'static,
    ) -> Stream<U> {
        filter_map_arc(self.clone(), Arc::new(f))
    }

    /// Depth-first bind: all of `f(x0)`, then all of `f(x1)`, ...
    pub fn flat_map<U: Clone + Send + Sync + 'static>(
        &self,
        f: impl Fn(T) -> Stream<U> + Send + Sync + 'static,
    ) -> Stream<U> {
        flat_map_arc(self.clone(), Arc::new(f))
    }

    /// Bind built on [`Stream::mplus`]: the results of `f(x0)` share turns with
    /// the rest whenever they suspend.
    pub fn bind<U: Clone + Send + Sync + 'static>(
        &self,
        f: impl Fn(T) -> Stream<U> + Send + Sync + 'static,
    ) -> Stream<U> {
        bind_arc(self.clone(), Arc::new(f))
    }
}

type ArcFn<A, B> = Arc<dyn Fn(A) -> B + Send + Sync>;

fn map_arc<T, U>(s: Stream<T>, f: ArcFn<T, U>) -> Stream<U>
where
    T: Clone + Send + Sync + 'static,
    U: Clone + Send + Sync + 'static,
{
    Stream::lazy(move || match s.uncons() {
        None => Stream::nil(),
        Some((h, t)) => Stream::cons(f(h), map_arc(t, f)),
    })
}

fn filter_arc<T>(s: Stream<T>, p: Arc<dyn Fn(&T) -> bool + Send + Sync>) -> Stream<T>
where
    T: Clone + Send + Sync + 'static,
{
    Stream::lazy(move || match s.uncons() {
        None => Stream::nil(),
        Some((h, t)) if p(&h) => Stream::cons(h, filter_arc(t, p)),
        // hand back a suspension so long runs of rejects are trampolined
        Some((_, t)) => filter_arc(t, p),
    })
}

fn filter_map_arc<T, U>(s: Stream<T>, f: ArcFn<T, Option<U>>) -> Stream<U>
where
    T: Clone + Send + Sync + 'static,
    U: Clone + Send + Sync + 'static,
{
    Stream::lazy(move || match s.uncons() {
        None => Stream::nil(),
        Some((h, t)) => match f(h) {
            Some(u) => Stream::cons(u, filter_map_arc(t, f)),
            None => filter_map_arc(t, f),
        },
    })
}

fn flat_map_arc<T, U>(s: Stream<T>, f: ArcFn<T, Stream<U>>) -> Stream<U>
where
    T: Clone + Send + Sync + 'static,
    U: Clone + Send + Sync + 'static,
{
    Stream::lazy(move || match s.uncons() {
        None => Stream::nil(),
        Some((h, t)) => f(h).append(move || flat_map_arc(t, f)),
    })
}

fn bind_arc<T, U>(s: Stream<T>, f: ArcFn<T, Stream<U>>) -> Stream<U>
where
    T: Clone + Send + Sync + 'static,
    U: Clone + Send + Sync + 'static,
{
    match &*s.0 {
        Node::Nil => Stream::nil(),
        Node::Cons(h, t) => {
            let first = f(h.clone());
            let t = t.clone();
            first.mplus(Stream::lazy(move || bind_arc(t, f)))
        }
        Node::Lazy(_) => Stream::lazy(move || match s.step() {
            Step::Delayed(inner) => bind_arc(inner, f),
            _ => unreachable!("a suspension steps to a delayed stream"),
        }),
    }
}

/// Round-robin merge of `producers` applied to `input`, together with the
/// `pending` suspended streams. Each round takes at most one element from every
/// live stream; exhausted streams drop out and suspended ones are advanced one
/// step and moved to the back.
pub fn mergef_stream<B, T>(
    producers: &[Arc<dyn Fn(&B) -> Stream<T> + Send + Sync>],
    pending: Vec<Box<dyn FnOnce() -> Stream<T> + Send>>,
    input: &B,
) -> Stream<T>
where
    B: Clone + Send + Sync + 'static,
    T: Clone + Send + Sync + 'static,
{
    let mut queue: VecDeque<Stream<T>> = VecDeque::new();
    for p in producers {
        queue.push_back(p(input));
    }
    for thunk in pending {
        queue.push_back(Stream::lazy(thunk));
    }
    round_robin(queue)
}

/// Fair merge of already-built streams.
pub fn interleave<T: Clone + Send + Sync + 'static>(streams: Vec<Stream<T>>) -> Stream<T> {
    round_robin(streams.into())
}

fn round_robin<T: Clone + Send + Sync + 'static>(mut queue: VecDeque<Stream<T>>) -> Stream<T> {
    Stream::lazy(move || loop {
        let Some(s) = queue.pop_front() else {
            return Stream::nil();
        };
        match s.step() {
            Step::Nil => continue,
            Step::Cons(h, t) => {
                queue.push_back(t);
                return Stream::cons(h, round_robin(queue));
            }
            Step::Delayed(inner) => {
                queue.push_back(inner);
                return round_robin(queue);
            }
        }
    })
}

pub struct StreamIter<T>(Stream<T>);

impl<T: Clone + Send + Sync + 'static> Iterator for StreamIter<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let (h, t) = self.0.uncons()?;
        self.0 = t;
        Some(h)
    }
}

impl<T: Clone + Send + Sync + 'static> FromIterator<T> for Stream<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Stream::from_vec(iter.into_iter().collect())
    }
}

impl<T> fmt::Debug for Stream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Nil => write!(f, "Stream[]"),
            Node::Cons(..) => write!(f, "Stream[..]"),
            Node::Lazy(_) => write!(f, "Stream<lazy>"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn nats_from(n: u64) -> Stream<u64> {
        Stream::lazy(move || Stream::cons(n, nats_from(n + 1)))
    }

    fn counted_nats(n: u64, counter: Arc<AtomicUsize>) -> Stream<u64> {
        Stream::lazy(move || {
            counter.fetch_add(1, Ordering::SeqCst);
            Stream::cons(n, counted_nats(n + 1, counter))
        })
    }

    #[test]
    fn take_prefix() {
        let s = Stream::from_vec(vec!['a', 'b', 'c']);
        assert_eq!(s.take(2), vec!['a', 'b']);
        assert_eq!(s.list_of_stream(), vec!['a', 'b', 'c']);
        assert_eq!(s.get(), Some('a'));
        assert_eq!(Stream::<u8>::nil().get(), None);
    }

    #[test]
    fn take_zero_forces_nothing() {
        let counter = Arc::new(AtomicUsize::new(0));
        let s = counted_nats(0, counter.clone());
        assert!(s.take(0).is_empty());
        assert_eq!(counter.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn laziness_bound() {
        let counter = Arc::new(AtomicUsize::new(0));
        let s = counted_nats(0, counter.clone());
        assert_eq!(s.take(5), vec![0, 1, 2, 3, 4]);
        assert!(counter.load(Ordering::SeqCst) <= 6);
    }

    #[test]
    fn memoized_forcing() {
        let counter = Arc::new(AtomicUsize::new(0));
        let s = counted_nats(0, counter.clone());
        s.take(10);
        let after_first = counter.load(Ordering::SeqCst);
        s.take(10);
        assert_eq!(counter.load(Ordering::SeqCst), after_first);
        s.take(12);
        assert_eq!(counter.load(Ordering::SeqCst), after_first + 2);
    }

    #[test]
    fn append_examples() {
        let s = Stream::single(1).append(|| Stream::single(2));
        assert_eq!(s.list_of_stream(), vec![1, 2]);
        let s = Stream::nil().append(|| Stream::from_vec(vec![7, 8]));
        assert_eq!(s.list_of_stream(), vec![7, 8]);
    }

    #[test]
    fn append_second_operand_suspended() {
        let forced = Arc::new(AtomicUsize::new(0));
        let f2 = forced.clone();
        let s = Stream::from_vec(vec![1, 2]).append(move || {
            f2.fetch_add(1, Ordering::SeqCst);
            Stream::single(3)
        });
        assert_eq!(s.take(2), vec![1, 2]);
        assert_eq!(forced.load(Ordering::SeqCst), 0);
        assert_eq!(s.take(3), vec![1, 2, 3]);
        assert_eq!(forced.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn flat_map_is_depth_first() {
        let s = Stream::from_vec(vec![10, 20]).flat_map(|g| Stream::from_vec(vec![g + 1, g + 2]));
        assert_eq!(s.list_of_stream(), vec![11, 12, 21, 22]);
    }

    #[test]
    fn mplus_sequential_when_forced() {
        let s = Stream::from_vec(vec![1, 2]).mplus(Stream::from_vec(vec![3]));
        assert_eq!(s.list_of_stream(), vec![1, 2, 3]);
    }

    #[test]
    fn mplus_yields_at_suspensions() {
        // An infinite suspended stream does not starve the second operand.
        let s = nats_from(0).mplus(Stream::single(100));
        assert!(s.take(10).contains(&100));
    }

    #[test]
    fn bind_does_not_starve() {
        let s = Stream::from_vec(vec![0u64, 1000]).bind(nats_from);
        let got = s.take(20);
        assert!(got.contains(&1000));
        assert!(got.contains(&0));
    }

    #[test]
    fn round_robin_merge() {
        let odds: Arc<dyn Fn(&u64) -> Stream<u64> + Send + Sync> = Arc::new(|_| {
            fn odd(n: u64) -> Stream<u64> {
                Stream::lazy(move || Stream::cons(n, odd(n + 2)))
            }
            odd(1)
        });
        let evens: Arc<dyn Fn(&u64) -> Stream<u64> + Send + Sync> = Arc::new(|_| Stream::from_vec(vec![2, 4]));
        let merged = mergef_stream(&[odds, evens], vec![], &0);
        // a suspended head gives up its turn
        assert_eq!(merged.take(6), vec![2, 1, 4, 3, 5, 7]);
    }

    #[test]
    fn merge_degenerate_cases() {
        let only: Arc<dyn Fn(&u8) -> Stream<u8> + Send + Sync> = Arc::new(|_| Stream::from_vec(vec![1, 2, 3]));
        assert_eq!(mergef_stream(&[only], vec![], &0).list_of_stream(), vec![1, 2, 3]);
        assert!(mergef_stream::<u8, u8>(&[], vec![], &0).list_of_stream().is_empty());
        let pending: Vec<Box<dyn FnOnce() -> Stream<u8> + Send>> = vec![Box::new(|| Stream::single(9))];
        assert_eq!(mergef_stream::<u8, u8>(&[], pending, &0).list_of_stream(), vec![9]);
    }

    #[test]
    fn shared_across_threads() {
        let counter = Arc::new(AtomicUsize::new(0));
        let s = counted_nats(0, counter.clone());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let s = s.clone();
                std::thread::spawn(move || s.take(50))
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), (0..50).collect::<Vec<_>>());
        }
        assert!(counter.load(Ordering::SeqCst) <= 51);
    }

    #[test]
    fn long_chains_drop_without_overflow() {
        let s = nats_from(0);
        assert_eq!(s.iter().nth(200_000), Some(200_000));
        drop(s);
    }
}
