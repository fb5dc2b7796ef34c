pub fn copy_into(a: &mut Vec<u32>, b: &mut Vec<u32>, N: u32)
    requires
        old(a).len() == N,
        old(b).len() == N,
        N <= 0xFFFF,
    ensures
        a.len() == N,
        b.len() == N,
        forall |k:int| 0 <= k < a.len() ==> a[k] == b[k],
{
    let mut i: usize = 0;
    while (i < N as usize)
        invariant
            i <= N as usize,
            a.len() == N, // the destination keeps its size
            b.len() == N, // the source keeps its size
            b == old(b),
            forall |k:int| 0 <= k < i ==> a[k] == b[k],
    {
        let x = b[i];
        a.set(i, x);
        i = i + 1;
    }
}
