pub fn foo(a: &mut Vec<u32>, N: u32)
    requires
        old(a).len() == N,
        N <= 0x7FFF_FFFF,
{
    let mut i: usize = 0;
    while (i < N as usize)
    {
        if (a[i] > 2) {
            a.set(i, 2);
        }
        i = i + 1;
    }
    i = 0;
    let mut sum: u32 = 0;
    while (i < N as usize)
    {
        sum = sum + a[i];
        i = i + 1;
    }
    assert(sum <= 2 * N);
}
