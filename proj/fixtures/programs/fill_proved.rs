pub fn fill_all(v: &mut Vec<u64>, n: u32, val: u64)
    requires
        old(v).len() == n,
        n <= 0xFFFF,
    ensures
        v.len() == n,
        forall |k:int| 0 <= k < v.len() ==> v[k] == val,
{
    let mut i: usize = 0;
    while (i < n as usize)
        invariant
            i <= n as usize,
            v.len() == n, // the vector keeps its size
            n <= 0xFFFF,
            forall |k:int| 0 <= k < i ==> v[k] == val,
    {
        v.set(i, val);
        i = i + 1;
    }
}
