pub fn foo(a: &mut Vec<u32>, N: u32)
    requires
        old(a).len() == N,
        N <= 0x7FFF_FFFF,
{
    let mut i: usize = 0;
    while (i < N as usize)
        invariant
            i <= N as usize,
            a.len() == N, // the vector keeps its size
            forall |k:int| 0 <= k < i ==> a[k] <= 2,
    {
        if (a[i] > 2) {
            a.set(i, 2);
        }
        i = i + 1;
    }
    i = 0;
    let mut sum: u32 = 0;
    while (i < N as usize)
        invariant
            i <= N as usize,
            a.len() == N,
            N <= 0x7FFF_FFFF,
            sum <= 2 * i,
            forall |k:int| 0 <= k < a.len() ==> a[k] <= 2,
    {
        sum = sum + a[i];
        i = i + 1;
    }
    assert(sum <= 2 * N);
}
