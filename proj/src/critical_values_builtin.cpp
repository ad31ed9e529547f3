// Generated by `varshift critvals --cpp`. Do not edit by hand; regenerate with
// the shipped seed to reproduce bit-exactly.

namespace varshift::icss::detail {

const char* builtin_critical_values_text() {
    static const char text[] = R"TBL(varshift-critical-values v1
# columns: length alpha value
# replications: 100000
# seed: 12345
# rng: splitmix64-boxmuller
# quantile: k-th smallest with k = ceil((1 - alpha) * replications)
25 0.01 1.4369901047979647
25 0.05 1.1821742392384444
25 0.1 1.056040090771663
50 0.01 1.5023590367741824
50 0.05 1.2392563449386262
50 0.1 1.1082577843172294
75 0.01 1.5264291575493492
75 0.05 1.2641457498439177
75 0.1 1.1330625771625966
100 0.01 1.535717210717365
100 0.05 1.273419270300305
100 0.1 1.1436265519916868
150 0.01 1.55786739186128
150 0.05 1.291892886360822
150 0.1 1.1588071230218682
200 0.01 1.5717137645475732
200 0.05 1.301588718384807
200 0.1 1.1707222257582406
300 0.01 1.5812882331603948
300 0.05 1.3101737630200097
300 0.1 1.1765672150860158
500 0.01 1.5999129078064
500 0.05 1.3225473300049562
500 0.1 1.1883520339929947
750 0.01 1.6051432035133886
750 0.05 1.3311216721011683
750 0.1 1.1966582429640027
1000 0.01 1.6037593451817636
1000 0.05 1.3349100086539878
1000 0.1 1.1991544694363618
)TBL";
    return text;
}

}  // namespace varshift::icss::detail
