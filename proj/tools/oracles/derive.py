from mpmath import mp, mpf, exp, log, findroot, sqrt, e, diff
mp.dps = 40
def W(b,x): return 1/(1+exp(b*x))
def Wp(b,x): return -b*exp(b*x)/(1+exp(b*x))**2
print("W(1,0.7)", W(1,mpf('0.7')))
print("Wp(1,3)", Wp(1,3))
print("cross_level full reveal b=1", mpf('0.5')*W(1,2))
b=4; d=mpf(b+2)/(b+1)
print("cross_level quarter-pool scheme b=4 lower", mpf('0.5')*mpf(1)/4*W(4,mpf(6)/5), " exact", 0.5*(1/mpf(4))*W(4,d)+0.5*(1-1/mpf(4))*W(4,2))
# kappa by bisection in mpmath
def kappa(b,dd):
    f=lambda x: Wp(b,x)*(dd-x)-(W(b,dd)-W(b,x))
    lo,hi=mpf(-1),mpf(0)
    while f(lo)*f(hi)>0: lo*=2
    for _ in range(300):
        mid=(lo+hi)/2
        if f(mid)*f(lo)>0: lo=mid
        else: hi=mid
    return (lo+hi)/2
for dd in [0.5,1,2,4]: print("kappa b=1",dd, kappa(1,mpf(dd)))
print("kappa b=2 dd=1", kappa(2,mpf(1)))
def gamma(b,v1,v2,d):
    r=(v1-d)/(v2-d)
    return r+(W(b,v2)-W(b,d))/(v2-d)/Wp(b,d)*(1-r)
print("gamma cross_level b=1 d=1.5", gamma(1,1,2,mpf('1.5')))
a=mpf(2); print("gamma sym a=2 b=1 at 0", gamma(1,-a,a,0), "closed", -1 + (W(1,a)-mpf(1)/2)/a/(-mpf(1)/4)*2)
# binary optimal cross_level b=1 (u1=0 -> ratio 0)
dh=findroot(lambda d: gamma(1,1,2,d), mpf('1.3'))
print("delta_hat cross_level b=1", dh)
lam1=lam2=mpf('0.5'); v1,v2=1,2
def Vcens(b,d,l1=lam1,l2=lam2,u1=0,u2=1):
    p=l1*(d-v1)/(l2*(v2-d))
    return l1*u1*W(b,d)+l2*u2*(p*W(b,d)+(1-p)*W(b,v2))
print("p", lam1*(dh-1)/(lam2*(2-dh)), "payoff", Vcens(1,dh))
# brute-force max of Vcens over d in [1,1.5]
best=max((Vcens(1,mpf(1)+mpf(k)/20000*mpf('0.5')),k) for k in range(20001)); print("grid max", best)
# ex 4.1 beta root of beta = 2m ln beta
for m in [3,4,5,6,7,8]:
    bb=findroot(lambda x: x/log(x)-2*m, mpf(20))
    print("signal_count m",m,"beta",bb)
for m in [3,4,5,6]:
    print("direct_gap beta", m, exp(m))
import math
K=1; A=16*math.e*K; q=math.sqrt(A)/(1+math.sqrt(A)); print("q",q,"bound",(4*math.sqrt(math.e*K)+1)**2, (4*math.sqrt(4*math.e)+1)**2)
