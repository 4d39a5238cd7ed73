// Generated by cobval 0.1.0: profile jvm-junit
// program ICDBGHNP paragraph GET-CUSTACC2 seed 7
import static org.junit.Assert.assertEquals;
import org.junit.Test;

public class AccountInquiry_GetCustacc2_Test {
    private final OrderedStubs stubs = OrderedStubs.install();
    private final AccountInquiry target = new AccountInquiry();

    @Test
    public void t001() {
        // -- initialize inputs
        target.wsInqCount = "0000";
        String wsReqAccno = "00000000";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", "C", "4:0", "0000000.00", "var:SQLCODE", "000000000"));
        // -- invoke
        target.getCustAcc2(wsReqAccno);
        // -- assert
        // assert:prog WS-ACCNO
        assertEquals("00000000", target.wsAccno);
        // assert:prog WS-CLASS-NAME
        assertEquals("CHECKING", target.wsClassName);
        // assert:prog WS-FEE
        assertEquals("002.50", target.wsFee);
        // assert:prog WS-INQ-COUNT
        assertEquals("0001", target.wsInqCount);
        // assert:prog WS-MSG
        assertEquals("                        ", target.wsMsg);
        // assert:prog WS-RC
        assertEquals("00", target.wsRc);
        // assert:res call=0 occ=1 var=WS-ACCNO slot=1:1
        assertEquals("00000000", stubs.captured(0, 1, "1:1"));
        // skip:AUD-CHANNEL reason=LocalInTarget
        // skip:AUD-PRIORITY reason=LocalInTarget
        // skip:AUD-SOURCE reason=LocalInTarget
        // skip:CAT-CHECKING reason=UnmappedVar
        // skip:CAT-LOAN reason=UnmappedVar
        // skip:CAT-SAVINGS reason=UnmappedVar
        // skip:FEE-CHECKING reason=UnmappedVar
        // skip:FEE-LOAN reason=UnmappedVar
        // skip:FEE-SAVINGS reason=UnmappedVar
        // skip:HP-LPAR reason=UnmappedVar
        // skip:HP-PLAN reason=UnmappedVar
        // skip:HP-SUBSYSTEM reason=UnmappedVar
    }

    @Test
    public void t002() {
        // -- initialize inputs
        target.wsInqCount = "0000";
        String wsReqAccno = "00000000";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", " ", "4:0", "0000000.00", "var:SQLCODE", "-999999999"));
        // -- invoke
        target.getCustAcc2(wsReqAccno);
        // -- assert
        // assert:prog WS-ACCNO
        assertEquals("00000000", target.wsAccno);
        // assert:prog WS-CLASS-NAME
        assertEquals("        ", target.wsClassName);
        // assert:prog WS-FEE
        assertEquals("000.00", target.wsFee);
        // assert:prog WS-INQ-COUNT
        assertEquals("0000", target.wsInqCount);
        // assert:prog WS-MSG
        assertEquals("ACCOUNT NOT FOUND       ", target.wsMsg);
        // assert:prog WS-RC
        assertEquals("01", target.wsRc);
        // assert:res call=0 occ=1 var=WS-ACCNO slot=1:1
        assertEquals("00000000", stubs.captured(0, 1, "1:1"));
        // skip:AUD-CHANNEL reason=LocalInTarget
        // skip:AUD-PRIORITY reason=LocalInTarget
        // skip:AUD-SOURCE reason=LocalInTarget
        // skip:CAT-CHECKING reason=UnmappedVar
        // skip:CAT-LOAN reason=UnmappedVar
        // skip:CAT-SAVINGS reason=UnmappedVar
        // skip:FEE-CHECKING reason=UnmappedVar
        // skip:FEE-LOAN reason=UnmappedVar
        // skip:FEE-SAVINGS reason=UnmappedVar
        // skip:HP-LPAR reason=UnmappedVar
        // skip:HP-PLAN reason=UnmappedVar
        // skip:HP-SUBSYSTEM reason=UnmappedVar
    }

    @Test
    public void t003() {
        // -- initialize inputs
        target.wsInqCount = "0000";
        String wsReqAccno = "00000000";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", "L", "4:0", "0000000.00", "var:SQLCODE", "000000000"));
        // -- invoke
        target.getCustAcc2(wsReqAccno);
        // -- assert
        // assert:prog WS-ACCNO
        assertEquals("00000000", target.wsAccno);
        // assert:prog WS-CLASS-NAME
        assertEquals("LOAN    ", target.wsClassName);
        // assert:prog WS-FEE
        assertEquals("012.75", target.wsFee);
        // assert:prog WS-INQ-COUNT
        assertEquals("0001", target.wsInqCount);
        // assert:prog WS-MSG
        assertEquals("                        ", target.wsMsg);
        // assert:prog WS-RC
        assertEquals("00", target.wsRc);
        // assert:res call=0 occ=1 var=WS-ACCNO slot=1:1
        assertEquals("00000000", stubs.captured(0, 1, "1:1"));
        // skip:AUD-CHANNEL reason=LocalInTarget
        // skip:AUD-PRIORITY reason=LocalInTarget
        // skip:AUD-SOURCE reason=LocalInTarget
        // skip:CAT-CHECKING reason=UnmappedVar
        // skip:CAT-LOAN reason=UnmappedVar
        // skip:CAT-SAVINGS reason=UnmappedVar
        // skip:FEE-CHECKING reason=UnmappedVar
        // skip:FEE-LOAN reason=UnmappedVar
        // skip:FEE-SAVINGS reason=UnmappedVar
        // skip:HP-LPAR reason=UnmappedVar
        // skip:HP-PLAN reason=UnmappedVar
        // skip:HP-SUBSYSTEM reason=UnmappedVar
    }

    @Test
    public void t004() {
        // -- initialize inputs
        target.wsInqCount = "0000";
        String wsReqAccno = "00000000";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", " ", "4:0", "0000000.00", "var:SQLCODE", "000000000"));
        // -- invoke
        target.getCustAcc2(wsReqAccno);
        // -- assert
        // assert:prog WS-ACCNO
        assertEquals("00000000", target.wsAccno);
        // assert:prog WS-CLASS-NAME
        assertEquals("        ", target.wsClassName);
        // assert:prog WS-FEE
        assertEquals("000.00", target.wsFee);
        // assert:prog WS-INQ-COUNT
        assertEquals("0001", target.wsInqCount);
        // assert:prog WS-MSG
        assertEquals("UNKNOWN ACCOUNT CLASS   ", target.wsMsg);
        // assert:prog WS-RC
        assertEquals("02", target.wsRc);
        // assert:res call=0 occ=1 var=WS-ACCNO slot=1:1
        assertEquals("00000000", stubs.captured(0, 1, "1:1"));
        // skip:AUD-CHANNEL reason=LocalInTarget
        // skip:AUD-PRIORITY reason=LocalInTarget
        // skip:AUD-SOURCE reason=LocalInTarget
        // skip:CAT-CHECKING reason=UnmappedVar
        // skip:CAT-LOAN reason=UnmappedVar
        // skip:CAT-SAVINGS reason=UnmappedVar
        // skip:FEE-CHECKING reason=UnmappedVar
        // skip:FEE-LOAN reason=UnmappedVar
        // skip:FEE-SAVINGS reason=UnmappedVar
        // skip:HP-LPAR reason=UnmappedVar
        // skip:HP-PLAN reason=UnmappedVar
        // skip:HP-SUBSYSTEM reason=UnmappedVar
    }

    @Test
    public void t005() {
        // -- initialize inputs
        target.wsInqCount = "0000";
        String wsReqAccno = "00000000";
        // -- arm order-dependent stubs
        // mock:seq=0 entry=0
        stubs.queue(0, java.util.Map.of("3:0", "S", "4:0", "0000000.00", "var:SQLCODE", "000000000"));
        // -- invoke
        target.getCustAcc2(wsReqAccno);
        // -- assert
        // assert:prog WS-ACCNO
        assertEquals("00000000", target.wsAccno);
        // assert:prog WS-CLASS-NAME
        assertEquals("SAVINGS ", target.wsClassName);
        // assert:prog WS-FEE
        assertEquals("000.00", target.wsFee);
        // assert:prog WS-INQ-COUNT
        assertEquals("0001", target.wsInqCount);
        // assert:prog WS-MSG
        assertEquals("                        ", target.wsMsg);
        // assert:prog WS-RC
        assertEquals("00", target.wsRc);
        // assert:res call=0 occ=1 var=WS-ACCNO slot=1:1
        assertEquals("00000000", stubs.captured(0, 1, "1:1"));
        // skip:AUD-CHANNEL reason=LocalInTarget
        // skip:AUD-PRIORITY reason=LocalInTarget
        // skip:AUD-SOURCE reason=LocalInTarget
        // skip:CAT-CHECKING reason=UnmappedVar
        // skip:CAT-LOAN reason=UnmappedVar
        // skip:CAT-SAVINGS reason=UnmappedVar
        // skip:FEE-CHECKING reason=UnmappedVar
        // skip:FEE-LOAN reason=UnmappedVar
        // skip:FEE-SAVINGS reason=UnmappedVar
        // skip:HP-LPAR reason=UnmappedVar
        // skip:HP-PLAN reason=UnmappedVar
        // skip:HP-SUBSYSTEM reason=UnmappedVar
    }
}
